"""Host canonicalization for advertiser identification."""

from __future__ import annotations

from urllib.parse import urlsplit

UNKNOWN_HOST = "unknown"


def canonicalize_host(url_or_host: str) -> str:
    """Reduce a URL or bare host to its canonical lowercase form.

    Scheme, port, path, credentials, and a leading ``www.`` are stripped;
    internationalized names are rendered in punycode. Anything that does not
    parse to a plausible host yields ``"unknown"``.
    """
    text = url_or_host.strip()
    if not text:
        return UNKNOWN_HOST
    try:
        if "//" in text.split("?", 1)[0].split("#", 1)[0]:
            parsed = urlsplit(text)
        else:
            parsed = urlsplit("//" + text)
        host = parsed.hostname
    except ValueError:
        return UNKNOWN_HOST
    if not host:
        return UNKNOWN_HOST
    while host.startswith("www."):
        host = host[4:]
    host = host.rstrip(".")
    if not host or "." not in host:
        return UNKNOWN_HOST
    if not host.isascii():
        try:
            host = host.encode("idna").decode("ascii")
        except UnicodeError:
            return UNKNOWN_HOST
    if any(ch.isspace() for ch in host):
        return UNKNOWN_HOST
    return host
