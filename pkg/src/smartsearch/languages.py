"""File-extension language detection and the language alias table."""

from __future__ import annotations

from typing import Optional

UNKNOWN = "unknown"

# extension (without dot, lowercase) -> canonical language id
_EXTENSIONS = {
    "py": "python",
    "go": "go",
    "rs": "rust",
    "ts": "typescript",
    "tsx": "typescript",
    "js": "javascript",
    "jsx": "javascript",
    "java": "java",
    "c": "c",
    "h": "c",
    "cpp": "cpp",
    "hpp": "cpp",
    "cc": "cpp",
    "rb": "ruby",
    "md": "markdown",
    "json": "json",
    "yaml": "yaml",
    "yml": "yaml",
    "tex": "tex",
}

CANONICAL_IDS = frozenset(_EXTENSIONS.values())

# what users type -> canonical id; every canonical id resolves to itself
_ALIASES = {
    "golang": "go",
    "c++": "cpp",
    "py": "python",
    "rs": "rust",
    "ts": "typescript",
    "js": "javascript",
    "rb": "ruby",
    "md": "markdown",
    "yml": "yaml",
}
_ALIASES.update({lang: lang for lang in CANONICAL_IDS})


def detect_language(path: str) -> str:
    """Canonical language id for a file path, by extension, else "unknown"."""
    name = path.rsplit("/", 1)[-1]
    if "." not in name[1:]:  # no extension, or a bare dotfile like .gitignore
        return UNKNOWN
    ext = name.rsplit(".", 1)[-1].lower()
    return _EXTENSIONS.get(ext, UNKNOWN)


def resolve_alias(name: str) -> Optional[str]:
    """Case-insensitive alias lookup; None when the name is not a known language."""
    return _ALIASES.get(name.lower())
