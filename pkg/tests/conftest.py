from __future__ import annotations

from datetime import datetime, timezone

import pytest

from bloomgate.config import AppConfig
from bloomgate.pipeline import build_context

FIXED_TIME = datetime(2026, 1, 15, 12, 0, 0, tzinfo=timezone.utc)


@pytest.fixture()
def mock_ctx():
    """Offline analysis context: deterministic judge, term-frequency embedder."""
    return build_context(AppConfig(), mock=True, fixed_time=FIXED_TIME)


@pytest.fixture()
def two_page_pdf() -> bytes:
    """A 2-page PDF with 'Part A' on page 1 and 'Part B' on page 2."""
    import io

    from reportlab.lib.pagesizes import letter
    from reportlab.pdfgen import canvas

    buf = io.BytesIO()
    c = canvas.Canvas(buf, pagesize=letter)
    c.drawString(72, 720, "Part A")
    c.drawString(72, 700, "Q1. Define TCP.")
    c.showPage()
    c.drawString(72, 720, "Part B")
    c.drawString(72, 700, "Q2. Design a replacement protocol.")
    c.showPage()
    c.save()
    return buf.getvalue()
