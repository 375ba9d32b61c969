"""Tokenization, lexical-diversity indices, category percentages, and
assembly of the named feature vector.

The default schema is 100 features: five diversity indices, four descriptors
(word count, words per sentence, dictionary percent, six-letter percent),
four summary variables (affine functions of category percentages), and 87
category percentages.
"""

from __future__ import annotations

import csv
import math
import warnings
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError
from .lexicon import Lexicon

try:
    from importlib import resources as _resources
except ImportError:  # pragma: no cover
    _resources = None

_APOSTROPHES = ("'", "’")
_SENTENCE_ENDS = (".", "?", "!")

DIVERSITY_NAMES = ("cttr", "brunet_w", "honore_r", "idea_density", "duplicate_proportion")
DESCRIPTOR_NAMES = ("word_count", "words_per_sentence", "dictionary_pct", "six_letter_pct")

# Exponent in Brunet's W = N^(V^-0.165); the standard literature constant.
BRUNET_EXPONENT = 0.165


@dataclass(frozen=True)
class TokenStream:
    """Lowercased word tokens plus sentence end positions.

    sentence_bounds is strictly increasing and, for a non-empty stream, its
    last element equals the token count.
    """

    tokens: tuple[str, ...]
    sentence_bounds: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def sentence_count(self) -> int:
        return len(self.sentence_bounds)


def tokenize(text: str) -> TokenStream:
    """Split text into lowercased tokens and sentence boundaries.

    Tokens are maximal runs of Unicode letters, digits, and internal
    apostrophes. Sentences end at '.', '?', '!', or end of text; empty
    sentences are dropped. Curly apostrophes are normalized to ASCII.
    """
    tokens: list[str] = []
    bounds: list[int] = []
    cur: list[str] = []
    n = len(text)
    for i, ch in enumerate(text):
        if ch.isalnum():
            cur.append(ch)
        elif ch in _APOSTROPHES and cur and i + 1 < n and text[i + 1].isalnum():
            cur.append("'")
        else:
            if cur:
                tokens.append("".join(cur).lower())
                cur.clear()
            if ch in _SENTENCE_ENDS and tokens and (not bounds or len(tokens) > bounds[-1]):
                bounds.append(len(tokens))
    if cur:
        tokens.append("".join(cur).lower())
    if tokens and (not bounds or len(tokens) > bounds[-1]):
        bounds.append(len(tokens))
    return TokenStream(tuple(tokens), tuple(bounds))


class PosLexicon:
    """Word -> coarse part-of-speech map with suffix fallbacks.

    Exact entries win; otherwise the first matching suffix rule applies,
    guarded so the remaining stem keeps at least three characters.
    """

    TAGS = frozenset({"pron", "det", "prep", "conj", "aux", "adv", "verb", "adj"})
    PROPOSITION_TAGS = frozenset({"verb", "adj", "adv", "prep", "conj"})

    def __init__(self, words: dict[str, str], suffixes: tuple[tuple[str, str], ...], name: str = ""):
        self.words = words
        self.suffixes = suffixes
        self.name = name

    def tag(self, token: str) -> str | None:
        hit = self.words.get(token)
        if hit is not None:
            return hit
        for suffix, tag in self.suffixes:
            if len(token) >= len(suffix) + 3 and token.endswith(suffix):
                return tag
        return None

    def is_proposition(self, token: str) -> bool:
        return self.tag(token) in self.PROPOSITION_TAGS


def parse_pos_lexicon(text: str, name: str = "") -> PosLexicon:
    words: dict[str, str] = {}
    suffixes: list[tuple[str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        if not s or s.startswith("#"):
            continue
        parts = s.split("\t")
        if len(parts) != 2:
            raise DataError(f"pos lexicon line {lineno}: expected 'word<TAB>tag'")
        word, tag = parts[0].strip().lower(), parts[1].strip()
        if tag not in PosLexicon.TAGS:
            raise DataError(f"pos lexicon line {lineno}: unknown tag {tag!r}")
        if word.startswith("-"):
            suffix = word[1:]
            if not suffix:
                raise DataError(f"pos lexicon line {lineno}: empty suffix")
            suffixes.append((suffix, tag))
        else:
            prior = words.get(word)
            if prior is not None and prior != tag:
                raise DataError(f"pos lexicon line {lineno}: conflicting tags for {word!r}")
            words[word] = tag
    return PosLexicon(words, tuple(suffixes), name=name)


def load_pos_lexicon(path) -> PosLexicon:
    import os

    with open(path, "r", encoding="utf-8") as fh:
        return parse_pos_lexicon(fh.read(), name=os.path.basename(str(path)))


def load_default_pos_lexicon() -> PosLexicon:
    text = _resources.files("lexiscreen.data").joinpath("pos.tsv").read_text("utf-8")
    return parse_pos_lexicon(text, name="pos.tsv")


@dataclass(frozen=True)
class LexicalDiversity:
    """Five transcript-level diversity indices.

    honore_r is +inf when every type is a hapax (V1 = V); the finite sentinel
    substitution happens at feature-vector assembly, not here.
    """

    cttr: float
    brunet_w: float
    honore_r: float
    idea_density: float
    duplicate_proportion: float


def lexical_diversity(stream: TokenStream, pos: PosLexicon) -> LexicalDiversity:
    """Compute CTTR, Brunet's W, Honore's R, idea density, and the adjacent
    duplicate proportion.

    cttr = V / sqrt(2N); brunet_w = N^(V^-0.165);
    honore_r = 100 ln(N) / (1 - V1/V); idea_density = P/N with P the count of
    proposition-tagged tokens; duplicate_proportion = adjacent equal pairs / N.
    """
    tokens = stream.tokens
    n = len(tokens)
    if n == 0:
        raise DataError("cannot compute diversity of empty transcript")
    counts = Counter(tokens)
    v = len(counts)
    v1 = sum(1 for c in counts.values() if c == 1)
    cttr = v / math.sqrt(2.0 * n)
    brunet = n ** (v ** -BRUNET_EXPONENT)
    if v1 == v:
        honore = math.inf
    else:
        honore = 100.0 * math.log(n) / (1.0 - v1 / v)
    props = sum(1 for t in tokens if pos.is_proposition(t))
    dups = sum(1 for i in range(1, n) if tokens[i] == tokens[i - 1])
    return LexicalDiversity(
        cttr=cttr,
        brunet_w=brunet,
        honore_r=honore,
        idea_density=props / n,
        duplicate_proportion=dups / n,
    )


def resolve_honore(diversity: LexicalDiversity, stream: TokenStream) -> float:
    """Finite value for honore_r: the all-hapax singularity 1 - V1/V = 0 is
    replaced by epsilon = 1/(2V), giving 200 V ln(N)."""
    if math.isfinite(diversity.honore_r):
        return diversity.honore_r
    n = len(stream.tokens)
    v = len(set(stream.tokens))
    return 200.0 * v * math.log(n)


@dataclass(frozen=True)
class CategoryProfile:
    """Category percentages plus the four descriptor values."""

    percentages: dict[str, float]
    word_count: int
    words_per_sentence: float
    dictionary_pct: float
    six_letter_pct: float


def category_percentages(stream: TokenStream, lexicon: Lexicon) -> CategoryProfile:
    """Percent of tokens hitting each dictionary category, plus descriptors.

    Every category in the lexicon is present in the output map (0.0 when no
    token hits it). A token counts toward the dictionary percent when its
    lookup is non-empty, and toward a category once regardless of how many of
    its other categories match.
    """
    tokens = stream.tokens
    n = len(tokens)
    if n == 0:
        raise DataError("cannot compute category percentages of empty transcript")
    hits: Counter[int] = Counter()
    in_dict = 0
    six = 0
    for t in tokens:
        ids = lexicon.lookup(t)
        if ids:
            in_dict += 1
            hits.update(ids)
        if len(t) > 6:
            six += 1
    percentages = {name: 100.0 * hits.get(cid, 0) / n for cid, name in lexicon.categories.items()}
    return CategoryProfile(
        percentages=percentages,
        word_count=n,
        words_per_sentence=n / stream.sentence_count,
        dictionary_pct=100.0 * in_dict / n,
        six_letter_pct=100.0 * six / n,
    )


@dataclass(frozen=True)
class AffineSpec:
    """intercept + sum(weight * category percent), clamped to [lo, hi]."""

    intercept: float
    weights: tuple[tuple[str, float], ...]
    lo: float
    hi: float


@dataclass(frozen=True)
class FeatureSchema:
    """Ordered feature names with kind tags and summary-variable recipes."""

    names: tuple[str, ...]
    kinds: tuple[str, ...]
    summaries: dict[str, AffineSpec]
    name: str = ""
    _index: dict[str, int] = field(init=False, repr=False, compare=False, default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(self.names)})

    def __len__(self) -> int:
        return len(self.names)

    def index_of(self, feature: str) -> int:
        try:
            return self._index[feature]
        except KeyError:
            raise DataError(f"unknown feature {feature!r}") from None

    def kind_of(self, feature: str) -> str:
        return self.kinds[self.index_of(feature)]

    @property
    def category_names(self) -> tuple[str, ...]:
        return tuple(n for n, k in zip(self.names, self.kinds) if k == "category")

    @property
    def fingerprint(self) -> str:
        return fingerprint_names(self.names)


def fingerprint_names(names) -> str:
    """Stable hash of an ordered feature-name sequence."""
    import hashlib

    return hashlib.sha256("\n".join(names).encode("utf-8")).hexdigest()


_KINDS = ("diversity", "descriptor", "summary", "category")


def _parse_affine(spec: str, lineno: int) -> AffineSpec:
    parts = spec.split(";")
    if len(parts) != 3:
        raise DataError(f"schema line {lineno}: affine spec must be 'intercept;weights;lo,hi'")
    try:
        intercept = float(parts[0])
    except ValueError:
        raise DataError(f"schema line {lineno}: bad intercept {parts[0]!r}") from None
    weights: list[tuple[str, float]] = []
    if parts[1].strip():
        for chunk in parts[1].split(","):
            if ":" not in chunk:
                raise DataError(f"schema line {lineno}: bad weight term {chunk!r}")
            cat, w = chunk.rsplit(":", 1)
            try:
                weights.append((cat.strip(), float(w)))
            except ValueError:
                raise DataError(f"schema line {lineno}: bad weight {w!r}") from None
    bounds = parts[2].split(",")
    if len(bounds) != 2:
        raise DataError(f"schema line {lineno}: clamp range must be 'lo,hi'")
    try:
        lo, hi = float(bounds[0]), float(bounds[1])
    except ValueError:
        raise DataError(f"schema line {lineno}: bad clamp range {parts[2]!r}") from None
    if not lo <= hi:
        raise DataError(f"schema line {lineno}: clamp range lo > hi")
    return AffineSpec(intercept, tuple(weights), lo, hi)


def parse_schema(text: str, name: str = "") -> FeatureSchema:
    names: list[str] = []
    kinds: list[str] = []
    summaries: dict[str, AffineSpec] = {}
    seen: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        if not s or s.startswith("#"):
            continue
        parts = s.split("\t")
        if len(parts) not in (2, 3):
            raise DataError(f"schema line {lineno}: expected 'name<TAB>kind[<TAB>affine]'")
        fname, kind = parts[0].strip(), parts[1].strip()
        if not fname:
            raise DataError(f"schema line {lineno}: empty feature name")
        if fname in seen:
            raise DataError(f"schema line {lineno}: duplicate feature name {fname!r}")
        if kind not in _KINDS:
            raise DataError(f"schema line {lineno}: unknown kind {kind!r}")
        if kind == "diversity" and fname not in DIVERSITY_NAMES:
            raise DataError(f"schema line {lineno}: unknown diversity feature {fname!r}")
        if kind == "descriptor" and fname not in DESCRIPTOR_NAMES:
            raise DataError(f"schema line {lineno}: unknown descriptor feature {fname!r}")
        if kind == "summary":
            if len(parts) != 3:
                raise DataError(f"schema line {lineno}: summary feature needs an affine spec")
            summaries[fname] = _parse_affine(parts[2].strip(), lineno)
        elif len(parts) == 3:
            raise DataError(f"schema line {lineno}: affine spec only allowed on summary features")
        names.append(fname)
        kinds.append(kind)
        seen.add(fname)
    if not names:
        raise DataError("schema: no feature lines found")
    return FeatureSchema(tuple(names), tuple(kinds), summaries, name=name)


def load_schema(path) -> FeatureSchema:
    import os

    with open(path, "r", encoding="utf-8") as fh:
        return parse_schema(fh.read(), name=os.path.basename(str(path)))


def load_default_schema() -> FeatureSchema:
    text = _resources.files("lexiscreen.data").joinpath("schema.tsv").read_text("utf-8")
    schema = parse_schema(text, name="schema.tsv")
    assert len(schema) == 100, "default schema must define exactly 100 features"
    return schema


def summary_variables(percentages: dict[str, float], schema: FeatureSchema) -> dict[str, float]:
    """Evaluate each summary feature's clamped affine form over category
    percentages; categories missing from the map contribute 0 with a warning."""
    out: dict[str, float] = {}
    for fname, spec in schema.summaries.items():
        val = spec.intercept
        for cat, w in spec.weights:
            p = percentages.get(cat)
            if p is None:
                warnings.warn(f"summary {fname!r}: category {cat!r} missing; using 0", stacklevel=2)
                p = 0.0
            val += w * p
        out[fname] = min(max(val, spec.lo), spec.hi)
    return out


@dataclass(frozen=True)
class FeatureVector:
    schema: FeatureSchema
    values: np.ndarray
    record_id: str | None = None

    def __post_init__(self):
        if len(self.values) != len(self.schema):
            raise DataError("feature vector length does not match schema")

    def __getitem__(self, feature: str) -> float:
        return float(self.values[self.schema.index_of(feature)])


def extract_features(
    text: str,
    lexicon: Lexicon,
    pos: PosLexicon,
    schema: FeatureSchema,
    record_id: str | None = None,
) -> FeatureVector:
    """Assemble the feature vector for one transcript in schema order.

    Pure function: identical inputs give bit-identical outputs. All values
    are finite; the honore_r singularity is resolved here.
    """
    stream = tokenize(text)
    if not stream.tokens:
        where = f" (id {record_id!r})" if record_id is not None else ""
        raise DataError(f"transcript{where} contains no tokens")
    div = lexical_diversity(stream, pos)
    profile = category_percentages(stream, lexicon)
    summaries = summary_variables(profile.percentages, schema)
    diversity_values = {
        "cttr": div.cttr,
        "brunet_w": div.brunet_w,
        "honore_r": resolve_honore(div, stream),
        "idea_density": div.idea_density,
        "duplicate_proportion": div.duplicate_proportion,
    }
    descriptor_values = {
        "word_count": float(profile.word_count),
        "words_per_sentence": profile.words_per_sentence,
        "dictionary_pct": profile.dictionary_pct,
        "six_letter_pct": profile.six_letter_pct,
    }
    values = np.empty(len(schema), dtype=np.float64)
    for i, (fname, kind) in enumerate(zip(schema.names, schema.kinds)):
        if kind == "diversity":
            values[i] = diversity_values[fname]
        elif kind == "descriptor":
            values[i] = descriptor_values[fname]
        elif kind == "summary":
            values[i] = summaries[fname]
        else:
            p = profile.percentages.get(fname)
            if p is None:
                warnings.warn(f"category {fname!r} not in dictionary; feature set to 0", stacklevel=2)
                p = 0.0
            values[i] = p
    return FeatureVector(schema=schema, values=values, record_id=record_id)


def extract_dataset(dataset, lexicon, pos, schema, skip_bad: bool = False):
    """Extract features for every record, preserving dataset order.

    Returns (ids, matrix, skipped) where skipped is a list of (id, message)
    for records rejected when skip_bad is set. Without skip_bad the first bad
    record raises.
    """
    ids: list[str] = []
    rows: list[np.ndarray] = []
    skipped: list[tuple[str, str]] = []
    for rec in dataset:
        try:
            fv = extract_features(rec.text, lexicon, pos, schema, record_id=rec.id)
        except DataError as e:
            if skip_bad:
                skipped.append((rec.id, str(e)))
                continue
            raise
        ids.append(rec.id)
        rows.append(fv.values)
    matrix = np.vstack(rows) if rows else np.empty((0, len(schema)), dtype=np.float64)
    return ids, matrix, skipped


def write_features_csv(path, ids, matrix, schema: FeatureSchema) -> None:
    """Feature CSV: header `id,<feature names>`, values with 9 significant
    digits, LF line endings for byte-stable output."""
    matrix = np.asarray(matrix, dtype=np.float64)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["id", *schema.names])
        for rid, row in zip(ids, matrix):
            writer.writerow([rid, *("%.9g" % v for v in row)])


def read_features_csv(path):
    """Read a feature CSV back as (ids, matrix, names)."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty feature file") from None
        if not header or header[0] != "id":
            raise DataError(f"{path}: first column must be 'id'")
        names = tuple(header[1:])
        if not names:
            raise DataError(f"{path}: no feature columns")
        ids: list[str] = []
        rows: list[list[float]] = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(names) + 1:
                raise DataError(f"{path} line {lineno}: expected {len(names) + 1} columns, got {len(row)}")
            ids.append(row[0])
            try:
                rows.append([float(v) for v in row[1:]])
            except ValueError:
                raise DataError(f"{path} line {lineno}: non-numeric feature value") from None
    matrix = np.array(rows, dtype=np.float64) if rows else np.empty((0, len(names)))
    return ids, matrix, names
