"""Lenient HTML document tree with a minimal selector language.

The selector subset covers tags, ids, classes, attribute presence/equality,
and the descendant combinator — enough to express the extraction rules while
keeping rule files portable. Parsing never raises on malformed markup.
"""

from __future__ import annotations

import re
from html.parser import HTMLParser
from typing import Iterator, Optional

VOID_TAGS = frozenset(
    {"area", "base", "br", "col", "embed", "hr", "img", "input",
     "link", "meta", "param", "source", "track", "wbr"}
)


class Node:
    __slots__ = ("tag", "attrs", "children", "parent")

    def __init__(self, tag: str, attrs: dict[str, str], parent: Optional["Node"]):
        self.tag = tag
        self.attrs = attrs
        self.children: list[object] = []  # Node or str
        self.parent = parent

    def text(self) -> str:
        """Concatenated descendant text, byte-exact (no whitespace folding)."""
        parts: list[str] = []
        stack: list[object] = list(reversed(self.children))
        while stack:
            item = stack.pop()
            if isinstance(item, str):
                parts.append(item)
            else:
                stack.extend(reversed(item.children))
        return "".join(parts)

    def classes(self) -> set[str]:
        return set(self.attrs.get("class", "").split())

    def iter_nodes(self) -> Iterator["Node"]:
        """All element descendants in document order (self excluded)."""
        stack: list[object] = list(reversed(self.children))
        while stack:
            item = stack.pop()
            if isinstance(item, Node):
                yield item
                stack.extend(reversed(item.children))

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"<Node {self.tag} {self.attrs}>"


class _TreeBuilder(HTMLParser):
    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.root = Node("#document", {}, None)
        self._stack = [self.root]

    def handle_starttag(self, tag, attrs):
        node = Node(tag, {k: (v if v is not None else "") for k, v in attrs}, self._stack[-1])
        self._stack[-1].children.append(node)
        if tag not in VOID_TAGS:
            self._stack.append(node)

    def handle_startendtag(self, tag, attrs):
        node = Node(tag, {k: (v if v is not None else "") for k, v in attrs}, self._stack[-1])
        self._stack[-1].children.append(node)

    def handle_endtag(self, tag):
        # Lenient close: pop to the nearest matching open tag, else ignore.
        for i in range(len(self._stack) - 1, 0, -1):
            if self._stack[i].tag == tag:
                del self._stack[i:]
                return

    def handle_data(self, data):
        if data:
            self._stack[-1].children.append(data)


def parse_html(text: str) -> Node:
    builder = _TreeBuilder()
    try:
        builder.feed(text)
        builder.close()
    except Exception:
        pass  # keep whatever tree was built before the parser choked
    return builder.root


_SIMPLE_RE = re.compile(
    r"(?P<tag>[a-zA-Z][\w-]*|\*)?"
    r"(?P<rest>(?:[.#][\w-]+|\[[\w-]+(?:=[^\]]*)?\])*)$"
)
_PART_RE = re.compile(r"\.(?P<cls>[\w-]+)|#(?P<id>[\w-]+)|\[(?P<attr>[\w-]+)(?:=(?P<val>[^\]]*))?\]")


class SimpleSelector:
    __slots__ = ("tag", "node_id", "class_names", "attr_checks")

    def __init__(self, tag, node_id, class_names, attr_checks):
        self.tag = tag
        self.node_id = node_id
        self.class_names = class_names
        self.attr_checks = attr_checks

    def matches(self, node: Node) -> bool:
        if self.tag and node.tag != self.tag:
            return False
        if self.node_id is not None and node.attrs.get("id") != self.node_id:
            return False
        if self.class_names and not self.class_names <= node.classes():
            return False
        for attr, value in self.attr_checks:
            if attr not in node.attrs:
                return False
            if value is not None and node.attrs[attr] != value:
                return False
        return True


class Selector:
    """A descendant chain of simple selectors."""

    __slots__ = ("parts", "source")

    def __init__(self, parts: list[SimpleSelector], source: str):
        self.parts = parts
        self.source = source

    def __repr__(self) -> str:  # pragma: no cover
        return f"Selector({self.source!r})"


class SelectorSyntaxError(ValueError):
    pass


def parse_selector(expression: str) -> Selector:
    tokens = expression.split()
    if not tokens:
        raise SelectorSyntaxError(f"empty selector: {expression!r}")
    parts = []
    for token in tokens:
        m = _SIMPLE_RE.match(token)
        if not m or (not m.group("tag") and not m.group("rest")):
            raise SelectorSyntaxError(f"bad selector token: {token!r}")
        tag = m.group("tag")
        tag = None if tag in (None, "*") else tag.lower()
        node_id = None
        class_names: set[str] = set()
        attr_checks: list[tuple[str, Optional[str]]] = []
        for part in _PART_RE.finditer(m.group("rest") or ""):
            if part.group("cls"):
                class_names.add(part.group("cls"))
            elif part.group("id"):
                node_id = part.group("id")
            else:
                attr_checks.append((part.group("attr"), part.group("val")))
        parts.append(SimpleSelector(tag, node_id, class_names, attr_checks))
    return Selector(parts, expression)


def _ancestors_within(node: Node, scope: Node) -> Iterator[Node]:
    cur = node.parent
    while cur is not None and cur is not scope:
        yield cur
        cur = cur.parent


def select(scope: Node, selector: Selector) -> list[Node]:
    """All descendants of ``scope`` matching the selector, in document order."""
    last = selector.parts[-1]
    prefix = selector.parts[:-1]
    out = []
    for node in scope.iter_nodes():
        if not last.matches(node):
            continue
        remaining = list(prefix)
        if remaining:
            for anc in _ancestors_within(node, scope):
                if remaining and remaining[-1].matches(anc):
                    remaining.pop()
            if remaining:
                continue
        out.append(node)
    return out


def select_first(scope: Node, selector: Selector) -> Optional[Node]:
    found = select(scope, selector)
    return found[0] if found else None
