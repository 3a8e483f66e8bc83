"""Shared tokenization for every explanation metric.

Lower-cases, keeps alphanumeric runs together, and splits punctuation off
as separate tokens.  The exact behavior is frozen by golden fixtures:
metric values are only comparable under one fixed tokenizer, so changes
here must be deliberate.

Inputs are expected to have coordinate tokens removed already (see
:func:`evil.prompts.strip_bbox_tokens`).
"""

from __future__ import annotations

import re

_TOKEN_RE = re.compile(r"\w+|[^\w\s]")


def tokenize(text: str) -> list[str]:
    """Lower-cased tokens, punctuation separated, never any empty token."""
    return _TOKEN_RE.findall(text.lower())
