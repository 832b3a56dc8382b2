import re
import unicodedata

_TOKEN = re.compile(r"[a-z0-9]+")


def normalize_tokens(text: str) -> list[str]:
    """Lowercase, ASCII-fold, split on anything that is not a letter or digit."""
    folded = unicodedata.normalize("NFKD", text).encode("ascii", "ignore").decode("ascii")
    return _TOKEN.findall(folded.lower())


def normalize(text: str) -> str:
    return " ".join(normalize_tokens(text))
