"""Category dictionary parsing and token lookup.

The dictionary format is a plain-text file with a category header block
delimited by lines containing a single ``%``, followed by word entries::

    %
    1<TAB>pronoun
    2<TAB>verb
    %
    # comment lines start with a hash
    she<TAB>1
    run*<TAB>2

Header lines map integer category ids to names.  Entry lines map a word to
one or more category ids.  A trailing ``*`` on an entry word makes it a
wildcard that matches any token starting with the stem.  Lookup gives exact
entries precedence over wildcards; among matching wildcards the longest stem
wins.  Matching is case-insensitive (everything is lowercased at parse time,
and tokens are already lowercased by the tokenizer).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DataError

try:  # py>=3.9
    from importlib import resources as _resources
except ImportError:  # pragma: no cover
    _resources = None


@dataclass(frozen=True)
class Lexicon:
    """Parsed category dictionary.

    categories: id -> name, insertion-ordered as in the header block.
    exact_entries: word -> frozenset of category ids.
    prefix_entries: wildcard stem (without the ``*``) -> frozenset of ids.
    """

    categories: dict[int, str]
    exact_entries: dict[str, frozenset[int]]
    prefix_entries: dict[str, frozenset[int]]
    name: str = ""
    _stems_by_length: tuple[tuple[int, dict[str, frozenset[int]]], ...] = field(
        init=False, repr=False, compare=False, default=()
    )

    def __post_init__(self):
        # Bucket wildcard stems by length, longest first, so lookup can stop
        # at the first bucket that matches.
        buckets: dict[int, dict[str, frozenset[int]]] = {}
        for stem, ids in self.prefix_entries.items():
            buckets.setdefault(len(stem), {})[stem] = ids
        ordered = tuple(sorted(buckets.items(), key=lambda kv: -kv[0]))
        object.__setattr__(self, "_stems_by_length", ordered)

    @property
    def category_names(self) -> tuple[str, ...]:
        return tuple(self.categories.values())

    def lookup(self, token: str) -> frozenset[int]:
        """Category ids for a token; empty frozenset when out of dictionary.

        An exact entry shadows all wildcard entries for the same token; there
        is no union across the two tiers.
        """
        hit = self.exact_entries.get(token)
        if hit is not None:
            return hit
        n = len(token)
        for length, stems in self._stems_by_length:
            if length > n:
                continue
            hit = stems.get(token[:length])
            if hit is not None:
                return hit
        return frozenset()

    def lookup_names(self, token: str) -> frozenset[str]:
        return frozenset(self.categories[i] for i in self.lookup(token))


def parse_lexicon(text: str, name: str = "") -> Lexicon:
    """Parse dictionary text into a Lexicon.

    Raises DataError naming the offending 1-based line for malformed input:
    missing or unterminated header block, non-integer ids, duplicate ids or
    names, entries referencing unknown ids, whitespace inside entry words,
    or a ``*`` anywhere but the final character.
    """
    categories: dict[int, str] = {}
    names_seen: set[str] = set()
    exact: dict[str, set[int]] = {}
    prefix: dict[str, set[int]] = {}

    lines = text.splitlines()
    i = 0
    n = len(lines)

    def skip_blank_comment(j: int) -> int:
        while j < n:
            s = lines[j].strip()
            if s and not s.startswith("#"):
                break
            j += 1
        return j

    i = skip_blank_comment(i)
    if i >= n or lines[i].strip() != "%":
        raise DataError(f"dictionary line {i + 1}: expected '%' opening the category block")
    i += 1
    closed = False
    while i < n:
        raw = lines[i]
        s = raw.strip()
        i += 1
        if not s or s.startswith("#"):
            continue
        if s == "%":
            closed = True
            break
        parts = s.split("\t")
        if len(parts) != 2:
            raise DataError(f"dictionary line {i}: category lines must be 'id<TAB>name'")
        ids, cname = parts[0].strip(), parts[1].strip()
        try:
            cid = int(ids)
        except ValueError:
            raise DataError(f"dictionary line {i}: category id {ids!r} is not an integer") from None
        if cid in categories:
            raise DataError(f"dictionary line {i}: duplicate category id {cid}")
        if not cname:
            raise DataError(f"dictionary line {i}: empty category name")
        if cname in names_seen:
            raise DataError(f"dictionary line {i}: duplicate category name {cname!r}")
        categories[cid] = cname
        names_seen.add(cname)
    if not closed:
        raise DataError("dictionary: category block never closed with '%'")
    if not categories:
        raise DataError("dictionary: category block is empty")

    while i < n:
        s = lines[i].strip()
        i += 1
        if not s or s.startswith("#"):
            continue
        parts = s.split("\t")
        if len(parts) < 2:
            raise DataError(f"dictionary line {i}: entry lines must be 'word<TAB>id[<TAB>id...]'")
        word = parts[0].strip().lower()
        if not word:
            raise DataError(f"dictionary line {i}: empty entry word")
        if any(c.isspace() for c in word):
            raise DataError(f"dictionary line {i}: entry word {word!r} contains whitespace")
        star = word.find("*")
        if star != -1 and star != len(word) - 1:
            raise DataError(f"dictionary line {i}: '*' is only allowed as the final character")
        ids = set()
        for p in parts[1:]:
            p = p.strip()
            try:
                cid = int(p)
            except ValueError:
                raise DataError(f"dictionary line {i}: category id {p!r} is not an integer") from None
            if cid not in categories:
                raise DataError(f"dictionary line {i}: unknown category id {cid}")
            ids.add(cid)
        if star != -1:
            prefix.setdefault(word[:-1], set()).update(ids)
        else:
            exact.setdefault(word, set()).update(ids)

    return Lexicon(
        categories=categories,
        exact_entries={w: frozenset(v) for w, v in exact.items()},
        prefix_entries={w: frozenset(v) for w, v in prefix.items()},
        name=name,
    )


def load_lexicon(path) -> Lexicon:
    import os

    with open(path, "r", encoding="utf-8") as fh:
        return parse_lexicon(fh.read(), name=os.path.basename(str(path)))


def load_default_lexicon() -> Lexicon:
    """The dictionary shipped with the package (87 categories)."""
    text = _resources.files("lexiscreen.data").joinpath("categories.dic").read_text("utf-8")
    return parse_lexicon(text, name="categories.dic")
