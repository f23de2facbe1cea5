from datetime import datetime, timezone
from urllib.parse import quote

import pytest

from serpaudit.extraction import (
    ExtractionRuleSet,
    RuleSetMismatch,
    default_rules,
    detect_block_page,
    extract_snapshot,
    parse_html,
    parse_rules_text,
    parse_selector,
    render_rules_text,
    resolve_ad_destination,
    select,
)
from serpaudit.ise import render_block_page

NOW = datetime(2019, 10, 1, 8, 0, tzinfo=timezone.utc)
RULES = default_rules()


def ad_block(name="clinic.example/offer", title="A headline", href="https://clinic.example/x", content="Creative text."):
    return (
        '<div class="ad-unit"><span class="ad-badge">Ad</span>'
        f'<a class="ad-headline" href="{href}">{title}</a>'
        f'<span class="ad-host">{name}</span>'
        f'<div class="ad-text">{content}</div></div>'
    )


def result_block(title, url, content="snippet"):
    return (
        '<div class="organic-result">'
        f'<a class="result-link" href="{url}"><h3 class="result-title">{title}</h3></a>'
        f'<div class="result-snippet">{content}</div></div>'
    )


def story_block(title, author, url):
    return (
        '<div class="story-card">'
        f'<a class="story-link" href="{url}"><div class="story-title">{title}</div></a>'
        f'<span class="story-author">{author}</span></div>'
    )


def page_of(ads="", results="", stories=""):
    return (
        "<!DOCTYPE html><html><body>"
        f'<div id="ads">{ads}</div><div id="results">{results}</div>'
        f'<div id="stories">{stories}</div></body></html>'
    )


class TestSelectorEngine:
    def test_tag_id_class_attribute(self):
        root = parse_html(
            '<div id="a" class="x y"><p class="x">one</p><span data-k="v">two</span></div>'
        )
        assert len(select(root, parse_selector("div#a"))) == 1
        assert len(select(root, parse_selector(".x"))) == 2
        assert len(select(root, parse_selector("p.x"))) == 1
        assert len(select(root, parse_selector("[data-k]"))) == 1
        assert len(select(root, parse_selector("[data-k=v]"))) == 1
        assert len(select(root, parse_selector("[data-k=w]"))) == 0

    def test_descendant_combinator(self):
        root = parse_html(
            '<div class="outer"><section><p class="hit">x</p></section></div><p class="hit">y</p>'
        )
        hits = select(root, parse_selector("div.outer p.hit"))
        assert len(hits) == 1
        assert hits[0].text() == "x"

    def test_document_order(self):
        root = parse_html("<i>1</i><b><i>2</i></b><i>3</i>")
        assert [n.text() for n in select(root, parse_selector("i"))] == ["1", "2", "3"]

    def test_malformed_markup_tolerated(self):
        root = parse_html("<div><p>unclosed<div class='x'>ok</div>")
        assert len(select(root, parse_selector("div.x"))) == 1

    def test_bad_selector_rejected(self):
        with pytest.raises(ValueError):
            parse_selector("div >> p")


class TestRuleFile:
    def test_round_trip(self):
        text = render_rules_text(RULES)
        again = parse_rules_text(text)
        assert again == RULES

    def test_unparseable_selector_rejected(self):
        bad = dict(RULES.rules, ads="div[[")
        with pytest.raises(ValueError):
            ExtractionRuleSet(version=1, rules=bad)

    def test_version_floor(self):
        with pytest.raises(ValueError):
            ExtractionRuleSet(version=0, rules=dict(RULES.rules))


class TestExtractSnapshot:
    def test_counts_and_positions(self):
        page = page_of(
            ads=ad_block() + ad_block(name="other.example", title="B"),
            results="".join(result_block(f"r{i}", f"https://r{i}.example") for i in range(10)),
            stories="".join(story_block(f"s{i}", f"author{i}", f"https://n.example/{i}") for i in range(3)),
        )
        snap = extract_snapshot(page, RULES, "stem cells", "com", NOW)
        assert (len(snap.ads), len(snap.results), len(snap.top_stories)) == (2, 10, 3)
        assert [r.position for r in snap.results] == list(range(1, 11))
        assert [s.position for s in snap.top_stories] == [1, 2, 3]
        assert snap.results[0].title == "r0"
        assert snap.ads[0].name == "clinic.example/offer"
        assert snap.ads[0].content == "Creative text."

    def test_empty_results_page_is_fine(self):
        snap = extract_snapshot(page_of(), RULES, "q", "com", NOW)
        assert not snap.ads and not snap.results and not snap.top_stories
        assert snap.blocked is False

    def test_captcha_page_blocked(self):
        snap = extract_snapshot(render_block_page("captcha"), RULES, "q", "com", NOW)
        assert snap.blocked is True
        assert snap.ads == () and snap.results == () and snap.top_stories == ()

    def test_rule_set_mismatch_on_big_unmatched_page(self):
        page = "<html><body>" + "<p>filler</p>" * 2000 + "</body></html>"
        assert len(page) > RULES.mismatch_length_threshold
        with pytest.raises(RuleSetMismatch) as exc:
            extract_snapshot(page, RULES, "q", "com", NOW)
        degraded = exc.value.snapshot
        assert degraded.ads == () and degraded.results == ()

    def test_small_unmatched_page_is_not_drift(self):
        snap = extract_snapshot("<html><body><p>nothing</p></body></html>", RULES, "q", "com", NOW)
        assert snap.ads == ()

    def test_never_throws_on_malformed_input(self):
        for garbage in ["", "<<<>>>", "<div", "\x00\x01", "a" * 50, "<p>" * 100]:
            snap = extract_snapshot(garbage, RULES, "q", "com", NOW)
            assert snap.ads == () and snap.blocked is False

    def test_raw_page_retention_flag(self):
        page = page_of(ads=ad_block())
        assert extract_snapshot(page, RULES, "q", "com", NOW).raw_page is None
        kept = extract_snapshot(page, RULES, "q", "com", NOW, retain_raw=True)
        assert kept.raw_page == page

    def test_determinism(self):
        page = page_of(ads=ad_block(), results=result_block("r", "u"))
        first = extract_snapshot(page, RULES, "q", "com", NOW)
        second = extract_snapshot(page, RULES, "q", "com", NOW)
        assert first == second

    def test_ad_without_name_and_url_dropped(self):
        page = page_of(ads='<div class="ad-unit"><div class="ad-text">only text</div></div>')
        snap = extract_snapshot(page, RULES, "q", "com", NOW)
        assert snap.ads == ()

    def test_escaped_content_recovered_exactly(self):
        content = 'cost < 5 & "free" \U0001f600'
        import html

        page = page_of(ads=ad_block(content=html.escape(content)))
        snap = extract_snapshot(page, RULES, "q", "com", NOW)
        assert snap.ads[0].content == content


class TestDetectBlockPage:
    def test_captcha_fixture(self):
        assert detect_block_page(render_block_page("captcha"), RULES) is True

    def test_unusual_traffic_text(self):
        assert detect_block_page(render_block_page("traffic"), RULES) is True

    def test_ordinary_serp(self):
        assert detect_block_page(page_of(ads=ad_block()), RULES) is False

    def test_empty_string(self):
        assert detect_block_page("", RULES) is False


class TestResolveAdDestination:
    ALLOW = RULES.redirect_param_allowlist

    def test_direct_link(self):
        assert (
            resolve_ad_destination("https://www.parkinsons.org.uk/research", self.ALLOW)
            == "parkinsons.org.uk"
        )

    def test_relay_with_embedded_destination(self):
        dest = "https://swissmedica.startstemcells.com/?lead=1"
        href = f"https://www.googleadservices.com/pagead/aclk?sa=L&ai=XyZ&adurl={quote(dest, safe='')}"
        assert resolve_ad_destination(href, self.ALLOW) == "swissmedica.startstemcells.com"

    def test_relay_without_destination(self):
        href = "https://adclick.g.doubleclick.net/ddm/clk/431?sig=AOD64"
        assert resolve_ad_destination(href, self.ALLOW) == "unknown"

    def test_relay_param_not_on_allowlist_ignored(self):
        dest = quote("https://clinic.example/x", safe="")
        href = f"https://www.googleadservices.com/pagead/aclk?tracking={dest}"
        assert resolve_ad_destination(href, self.ALLOW) == "unknown"

    def test_total_function(self):
        for href in ["", "::::", "javascript:void(0)", "/relative"]:
            assert resolve_ad_destination(href, self.ALLOW) == "unknown"
