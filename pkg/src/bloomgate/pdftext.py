"""Minimal PDF text extraction: classic cross-referenced PDFs with plain or
Flate-compressed content streams and simple (one-byte) font encodings.

Scope is reading-order text recovery, page by page. Encrypted files and
compressed object streams are rejected; exotic filters are skipped.
"""

from __future__ import annotations

import base64
import re
import zlib


class PdfExtractionError(Exception):
    pass


_OBJ_HEADER_RE = re.compile(rb"(\d+)\s+(\d+)\s+obj\b")
_ROOT_RE = re.compile(rb"/Root\s+(\d+)\s+\d+\s+R")
_PAGES_REF_RE = re.compile(rb"/Pages\s+(\d+)\s+\d+\s+R")
_KIDS_RE = re.compile(rb"/Kids\s*\[((?:[^\[\]])*)\]")
_REF_RE = re.compile(rb"(\d+)\s+\d+\s+R")
_TYPE_RE = re.compile(rb"/Type\s*/(\w+)")
_CONTENTS_RE = re.compile(rb"/Contents\s+(?:(\d+)\s+\d+\s+R|\[((?:[^\[\]])*)\])")
_FILTER_RE = re.compile(rb"/Filter\s*(?:/(\w+)|\[\s*((?:/\w+\s*)+)\])")


def _scan_objects(data: bytes) -> dict[int, tuple[bytes, bytes | None]]:
    """Map object number -> (dict source, raw stream bytes or None)."""
    objects: dict[int, tuple[bytes, bytes | None]] = {}
    pos = 0
    while True:
        m = _OBJ_HEADER_RE.search(data, pos)
        if not m:
            break
        obj_num = int(m.group(1))
        body_start = m.end()
        stream_at = data.find(b"stream", body_start)
        endobj_at = data.find(b"endobj", body_start)
        if endobj_at == -1:
            break
        if stream_at != -1 and stream_at < endobj_at:
            head = data[body_start:stream_at]
            raw_start = stream_at + len(b"stream")
            if data[raw_start : raw_start + 2] == b"\r\n":
                raw_start += 2
            elif data[raw_start : raw_start + 1] == b"\n":
                raw_start += 1
            end_stream = data.find(b"endstream", raw_start)
            if end_stream == -1:
                raise PdfExtractionError("unterminated stream object")
            stream = data[raw_start:end_stream]
            endobj_at = data.find(b"endobj", end_stream)
            if endobj_at == -1:
                break
            objects[obj_num] = (head, stream)
        else:
            objects[obj_num] = (data[body_start:endobj_at], None)
        pos = endobj_at + len(b"endobj")
    return objects


def _decode_stream(head: bytes, stream: bytes) -> bytes | None:
    m = _FILTER_RE.search(head)
    if not m:
        return stream
    names = [m.group(1)] if m.group(1) else re.findall(rb"/(\w+)", m.group(2))
    out = stream
    for name in names:
        if name == b"FlateDecode":
            try:
                out = zlib.decompress(out)
            except zlib.error as exc:
                raise PdfExtractionError(f"bad Flate stream: {exc}") from exc
        elif name == b"ASCII85Decode":
            payload = out.strip()
            if payload.endswith(b"~>"):
                payload = payload[:-2]
            if payload.startswith(b"<~"):
                payload = payload[2:]
            try:
                out = base64.a85decode(payload, adobe=False, ignorechars=b" \t\n\r\v")
            except ValueError as exc:
                raise PdfExtractionError(f"bad ASCII85 stream: {exc}") from exc
        else:
            return None  # unsupported filter; caller skips this stream
    return out


def _page_order(objects: dict[int, tuple[bytes, bytes | None]], data: bytes) -> list[int]:
    """Page object numbers in reading order via the page tree, with a
    file-order fallback."""
    root_m = None
    for root_m in _ROOT_RE.finditer(data):
        pass
    pages_root = None
    if root_m:
        catalog = objects.get(int(root_m.group(1)))
        if catalog:
            pm = _PAGES_REF_RE.search(catalog[0])
            if pm:
                pages_root = int(pm.group(1))

    ordered: list[int] = []

    def walk(num: int, seen: set[int]) -> None:
        if num in seen or num not in objects:
            return
        seen.add(num)
        head = objects[num][0]
        type_m = _TYPE_RE.search(head)
        obj_type = type_m.group(1) if type_m else b""
        if obj_type == b"Page":
            ordered.append(num)
            return
        kids_m = _KIDS_RE.search(head)
        if kids_m:
            for ref in _REF_RE.finditer(kids_m.group(1)):
                walk(int(ref.group(1)), seen)

    if pages_root is not None:
        walk(pages_root, set())
    if not ordered:
        for num in objects:
            type_m = _TYPE_RE.search(objects[num][0])
            if type_m and type_m.group(1) == b"Page":
                ordered.append(num)
    return ordered


def _decode_pdf_string(raw: bytes) -> str:
    return raw.decode("latin-1", errors="replace")


_ESCAPES = {
    ord("n"): b"\n",
    ord("r"): b"\r",
    ord("t"): b"\t",
    ord("b"): b"\b",
    ord("f"): b"\f",
    ord("("): b"(",
    ord(")"): b")",
    ord("\\"): b"\\",
}


def _parse_literal_string(data: bytes, start: int) -> tuple[bytes, int]:
    """Parse a balanced ``(...)`` string starting at ``start`` (the paren)."""
    out = bytearray()
    depth = 1
    i = start + 1
    n = len(data)
    while i < n and depth > 0:
        c = data[i]
        if c == 0x5C:  # backslash
            i += 1
            if i >= n:
                break
            e = data[i]
            if e in _ESCAPES:
                out += _ESCAPES[e]
                i += 1
            elif 0x30 <= e <= 0x37:  # octal
                oct_digits = bytearray([e])
                i += 1
                while i < n and len(oct_digits) < 3 and 0x30 <= data[i] <= 0x37:
                    oct_digits.append(data[i])
                    i += 1
                out.append(int(oct_digits.decode("ascii"), 8) & 0xFF)
            elif e in (0x0A, 0x0D):  # line continuation
                i += 1
                if e == 0x0D and i < n and data[i] == 0x0A:
                    i += 1
            else:
                out.append(e)
                i += 1
        elif c == 0x28:  # (
            depth += 1
            out.append(c)
            i += 1
        elif c == 0x29:  # )
            depth -= 1
            if depth > 0:
                out.append(c)
            i += 1
        else:
            out.append(c)
            i += 1
    return bytes(out), i


def _parse_hex_string(data: bytes, start: int) -> tuple[bytes, int]:
    end = data.find(b">", start)
    if end == -1:
        return b"", len(data)
    digits = re.sub(rb"\s+", b"", data[start + 1 : end])
    if len(digits) % 2:
        digits += b"0"
    try:
        return bytes.fromhex(digits.decode("ascii")), end + 1
    except ValueError:
        return b"", end + 1


_OPERATOR_RE = re.compile(rb"[A-Za-z'\"*]+")

_NEWLINE_OPS = {b"Td", b"TD", b"T*", b"Tm", b"BT"}
_SHOW_OPS = {b"Tj", b"TJ", b"'", b'"'}


def _content_text(content: bytes) -> str:
    """Concatenate text-showing operands in stream order; text-positioning
    operators become line breaks."""
    parts: list[str] = []
    pending: list[str] = []
    line_open = False
    i = 0
    n = len(content)
    while i < n:
        c = content[i]
        if c == 0x28:  # (
            raw, i = _parse_literal_string(content, i)
            pending.append(_decode_pdf_string(raw))
        elif c == 0x3C:  # <
            if content[i : i + 2] == b"<<":
                i += 2
            else:
                raw, i = _parse_hex_string(content, i)
                pending.append(_decode_pdf_string(raw))
        elif c == 0x25:  # % comment
            nl = content.find(b"\n", i)
            i = n if nl == -1 else nl + 1
        elif c == 0x2F:  # /name
            m = re.compile(rb"/[^\s\[\]<>()/%]*").match(content, i)
            i = m.end() if m else i + 1
        else:
            m = _OPERATOR_RE.match(content, i)
            if m:
                op = m.group(0)
                if op in _SHOW_OPS:
                    text = "".join(pending)
                    if text:
                        if op in (b"'", b'"') and line_open:
                            parts.append("\n")
                        parts.append(text)
                        line_open = True
                elif op in _NEWLINE_OPS:
                    if line_open:
                        parts.append("\n")
                        line_open = False
                pending.clear()
                i = m.end()
            else:
                i += 1
    return "".join(parts)


def extract_page_texts(data: bytes) -> list[str]:
    """Text of each page, in page order."""
    if not data.startswith(b"%PDF-"):
        raise PdfExtractionError("not a PDF: missing %PDF- header")
    if b"/Encrypt" in data:
        raise PdfExtractionError("encrypted PDFs are not supported")

    objects = _scan_objects(data)
    if not objects:
        raise PdfExtractionError("no PDF objects found")
    page_nums = _page_order(objects, data)
    if not page_nums:
        if b"/ObjStm" in data:
            raise PdfExtractionError("compressed object streams are not supported")
        raise PdfExtractionError("no pages found")

    pages: list[str] = []
    for num in page_nums:
        head, _ = objects[num]
        cm = _CONTENTS_RE.search(head)
        content_refs: list[int] = []
        if cm:
            if cm.group(1):
                content_refs = [int(cm.group(1))]
            else:
                content_refs = [int(r.group(1)) for r in _REF_RE.finditer(cm.group(2))]
        chunks = []
        for ref in content_refs:
            obj = objects.get(ref)
            if not obj or obj[1] is None:
                continue
            decoded = _decode_stream(obj[0], obj[1])
            if decoded is not None:
                chunks.append(_content_text(decoded))
        pages.append("\n".join(c for c in chunks if c))
    return pages
