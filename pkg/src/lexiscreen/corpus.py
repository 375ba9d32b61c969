"""Transcript records, dataset loading, severity bands, fold assignment,
bootstrap resampling, and the synthetic transcript generator."""

from __future__ import annotations

import csv
import enum
import json
import warnings
from dataclasses import dataclass, replace

import numpy as np

from . import streams
from .errors import DataError, UsageError

_SEXES = ("female", "male")


@dataclass(frozen=True)
class TranscriptRecord:
    id: str
    text: str
    diagnosis: int | None = None
    mmse: int | None = None
    age: int | None = None
    sex: str | None = None
    language: str | None = None

    def __post_init__(self):
        if not isinstance(self.id, str) or not self.id:
            raise DataError("record id must be a non-empty string")
        if not isinstance(self.text, str):
            raise DataError(f"record {self.id!r}: text must be a string")
        if self.diagnosis is not None and self.diagnosis not in (0, 1):
            raise DataError(f"record {self.id!r}: diagnosis must be 0 or 1")
        if self.mmse is not None:
            if isinstance(self.mmse, bool) or not isinstance(self.mmse, int):
                raise DataError(f"record {self.id!r}: mmse must be an integer")
            if not 0 <= self.mmse <= 30:
                raise DataError(f"record {self.id!r}: mmse out of range [0,30]")
        if self.age is not None and (not isinstance(self.age, int) or self.age <= 0):
            raise DataError(f"record {self.id!r}: age must be a positive integer")
        if self.sex is not None and self.sex not in _SEXES:
            raise DataError(f"record {self.id!r}: sex must be one of {_SEXES}")


@dataclass(frozen=True)
class Dataset:
    """Insertion-ordered collection of records.

    Ids are unique in any ingested dataset; bootstrap resamples deliberately
    carry repeats, so uniqueness is enforced at load/generation time rather
    than by this container.
    """

    records: tuple[TranscriptRecord, ...]
    name: str = ""

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, i):
        return self.records[i]

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(r.id for r in self.records)

    def require_unique_ids(self) -> None:
        seen: set[str] = set()
        for r in self.records:
            if r.id in seen:
                raise DataError(f"duplicate id {r.id!r}")
            seen.add(r.id)


class SeverityGroup(enum.Enum):
    CN = "CN"
    MCI = "MCI"
    MODERATE = "Moderate"
    SEVERE = "Severe"


def severity_group(mmse: int) -> SeverityGroup:
    """Band an MMSE total: CN (26,30], MCI (20,26], Moderate [10,20],
    Severe [0,10)."""
    if isinstance(mmse, bool) or not isinstance(mmse, (int, np.integer)):
        raise DataError("mmse must be an integer")
    if not 0 <= mmse <= 30:
        raise DataError("mmse out of range [0,30]")
    if mmse > 26:
        return SeverityGroup.CN
    if mmse > 20:
        return SeverityGroup.MCI
    if mmse >= 10:
        return SeverityGroup.MODERATE
    return SeverityGroup.SEVERE


_KNOWN_FIELDS = ("id", "text", "diagnosis", "mmse", "age", "sex", "language")


def _coerce_record(raw: dict, lineno: int) -> TranscriptRecord:
    for req in ("id", "text"):
        if raw.get(req) in (None, ""):
            raise DataError(f"missing required field '{req}' at line {lineno}")
    rid = raw["id"]
    if not isinstance(rid, str):
        rid = str(rid)
    text = raw["text"]
    if not isinstance(text, str):
        raise DataError(f"text must be a string at line {lineno}")

    def as_int(key):
        v = raw.get(key)
        if v is None or v == "":
            return None
        if isinstance(v, bool):
            raise DataError(f"{key} must be an integer at line {lineno}")
        if isinstance(v, int):
            return v
        if isinstance(v, float):
            if v != int(v):
                raise DataError(f"{key} must be an integer at line {lineno}")
            return int(v)
        try:
            return int(str(v).strip())
        except ValueError:
            raise DataError(f"{key} must be an integer at line {lineno}") from None

    diagnosis = as_int("diagnosis")
    if diagnosis is not None and diagnosis not in (0, 1):
        raise DataError(f"diagnosis must be 0 or 1 at line {lineno}")
    mmse = as_int("mmse")
    if mmse is not None and not 0 <= mmse <= 30:
        raise DataError(f"mmse out of range [0,30] at line {lineno}")
    age = as_int("age")
    if age is not None and age <= 0:
        raise DataError(f"age must be positive at line {lineno}")
    sex = raw.get("sex") or None
    if sex is not None:
        sex = str(sex).strip().lower()
        if sex not in _SEXES:
            raise DataError(f"sex must be one of {_SEXES} at line {lineno}")
    language = raw.get("language") or None
    if language is not None:
        language = str(language)
    return TranscriptRecord(
        id=rid, text=text, diagnosis=diagnosis, mmse=mmse, age=age, sex=sex, language=language
    )


def load_dataset(path, format: str | None = None) -> Dataset:
    """Load transcripts from JSONL or CSV.

    Malformed lines raise line-numbered errors; duplicate ids are rejected;
    unknown CSV/JSONL fields are ignored with a warning.
    """
    import os

    p = str(path)
    if format is None:
        if p.endswith(".jsonl"):
            format = "jsonl"
        elif p.endswith(".csv"):
            format = "csv"
        else:
            raise UsageError(f"cannot infer format of {p!r}; pass format='jsonl' or 'csv'")
    if format not in ("jsonl", "csv"):
        raise UsageError(f"unknown dataset format {format!r}")

    records: list[TranscriptRecord] = []
    seen: dict[str, int] = {}
    warned: set[str] = set()

    def add(raw: dict, lineno: int):
        unknown = [k for k in raw if k not in _KNOWN_FIELDS]
        for k in unknown:
            if k not in warned:
                warnings.warn(f"{os.path.basename(p)}: ignoring unknown field {k!r}", stacklevel=3)
                warned.add(k)
            raw.pop(k)
        rec = _coerce_record(raw, lineno)
        if rec.id in seen:
            raise DataError(f"duplicate id {rec.id!r} at line {lineno}")
        seen[rec.id] = lineno
        records.append(rec)

    if format == "jsonl":
        with open(p, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    raw = json.loads(line)
                except json.JSONDecodeError as e:
                    raise DataError(f"invalid JSON at line {lineno}: {e.msg}") from None
                if not isinstance(raw, dict):
                    raise DataError(f"expected a JSON object at line {lineno}")
                add(dict(raw), lineno)
    else:
        with open(p, "r", encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None:
                raise DataError(f"{p}: empty CSV file")
            for row in reader:
                if row.get(None) is not None:
                    raise DataError(f"too many columns at line {reader.line_num}")
                add({k: v for k, v in row.items() if k is not None}, reader.line_num)
    return Dataset(tuple(records), name=os.path.basename(p))


@dataclass(frozen=True)
class FoldAssignment:
    """Mapping of record id to fold index, 0..k-1."""

    fold_of: dict[str, int]
    k: int

    def test_ids(self, fold: int) -> tuple[str, ...]:
        return tuple(i for i, f in sorted(self.fold_of.items()) if f == fold)

    def train_ids(self, fold: int) -> tuple[str, ...]:
        return tuple(i for i, f in sorted(self.fold_of.items()) if f != fold)

    def as_array(self, ids) -> np.ndarray:
        return np.array([self.fold_of[i] for i in ids], dtype=np.int64)


def assign_folds(ids, labels, k: int, seed: int) -> FoldAssignment:
    """Stratified fold assignment: ids are sorted lexicographically, shuffled
    within each class with a seeded generator, and dealt round-robin, so
    per-fold class counts differ by at most one."""
    ids = list(ids)
    labels = list(labels)
    if len(ids) != len(labels):
        raise UsageError("ids and labels must have equal length")
    if k < 2:
        raise UsageError(f"fold count must be at least 2, got {k}")
    if len(set(ids)) != len(ids):
        raise DataError("duplicate ids in fold assignment")
    order = sorted(range(len(ids)), key=lambda i: ids[i])
    rng = streams.generator(seed, streams.FOLDS, 0)
    fold_of: dict[str, int] = {}
    for cls in sorted(set(labels)):
        members = [i for i in order if labels[i] == cls]
        if len(members) < k:
            raise DataError(f"class {cls} has only {len(members)} records for {k} folds")
        perm = rng.permutation(len(members))
        for j, pi in enumerate(perm):
            fold_of[ids[members[pi]]] = j % k
    return FoldAssignment(fold_of, k)


def assign_folds_unstratified(ids, k: int, seed: int) -> FoldAssignment:
    """Fold assignment without class stratification (regression targets)."""
    ids = list(ids)
    if k < 2:
        raise UsageError(f"fold count must be at least 2, got {k}")
    if len(ids) < k:
        raise DataError(f"only {len(ids)} records for {k} folds")
    if len(set(ids)) != len(ids):
        raise DataError("duplicate ids in fold assignment")
    ordered = sorted(ids)
    rng = streams.generator(seed, streams.FOLDS, 0)
    perm = rng.permutation(len(ordered))
    return FoldAssignment({ordered[pi]: j % k for j, pi in enumerate(perm)}, k)


def stratified_folds(dataset: Dataset, k: int, seed: int) -> FoldAssignment:
    """Stratify a labeled dataset by diagnosis."""
    for r in dataset:
        if r.diagnosis is None:
            raise DataError(f"record {r.id!r} has no diagnosis; cannot stratify")
    return assign_folds(dataset.ids, [r.diagnosis for r in dataset], k, seed)


def bootstrap_sample(dataset: Dataset, seed: int) -> Dataset:
    """Sample len(dataset) records with replacement; ids are retained, so the
    result usually carries duplicates."""
    n = len(dataset)
    if n == 0:
        raise DataError("cannot bootstrap an empty dataset")
    rng = streams.generator(seed, streams.BOOTSTRAP, 0)
    idx = rng.integers(0, n, size=n)
    recs = tuple(dataset.records[i] for i in idx)
    return Dataset(recs, name=f"{dataset.name}#bootstrap(seed={seed})")


# Word pools for the synthetic generator. The planted signal lives in the
# pronoun and assent pools; filler words are injected at the same rate for
# both classes so the informal parent category does not mirror assent exactly.
PRONOUN_POOL = ("it", "he", "she", "they", "i", "we", "you", "this", "that")
ASSENT_POOL = ("yeah", "yes", "okay", "ok")
FAMILY_POOL = ("mother", "father", "sister", "brother", "wife", "husband", "family")
FILLER_POOL = ("um", "uh", "er", "hmm")

CONTENT_POOL = (
    "the", "cookie", "washed", "little", "water", "a", "jar", "dried", "big",
    "window", "of", "stool", "fell", "old", "plate", "in", "sink", "climbed",
    "small", "curtain", "on", "cup", "reached", "tall", "kitchen", "at",
    "dish", "spilled", "warm", "counter", "with", "cupboard", "dropped",
    "cold", "floor", "from", "garden", "opened", "dirty", "door", "over",
    "chair", "closed", "clean", "table", "under", "bread", "started", "wet",
    "house", "near", "milk", "finished", "dry", "home", "into", "tea",
    "stopped", "empty", "yard", "behind", "coffee", "turned", "full", "school",
    "beside", "cake", "moved", "busy", "store", "through", "apple", "carried",
    "quiet", "book", "around", "egg", "brought", "bright", "story", "along",
    "sugar", "found", "dark", "song", "outside", "dinner", "took", "red",
    "music", "inside", "lunch", "gave", "blue", "game", "toward", "morning",
    "made", "green", "car", "between", "afternoon", "went", "white", "tree",
    "above", "evening", "came", "black", "street", "below", "night", "said",
    "yellow", "town", "off", "summer", "told", "brown", "river", "out",
    "winter", "saw", "heavy", "hand", "up", "boy", "heard", "round", "head",
    "down", "girl", "felt", "fresh", "arm", "then", "dog", "knew", "sweet",
    "leg", "there", "cat", "thought", "high", "foot", "here", "bird", "walked",
    "low", "face", "again", "horse", "ran", "long", "hair", "soon", "fish",
    "stood", "slow", "heart", "once", "bell", "sat", "fast", "shoe", "away",
    "lamp", "looked", "quick", "coat", "back", "clock", "watched", "ready",
    "hat", "still", "spoon", "helped", "soft", "glass", "twice", "knife",
    "asked", "warmly", "box", "later", "fork", "played", "gently", "bag",
    "early", "bowl", "worked", "slowly", "rope", "often", "pot", "cooked",
    "quickly", "wall", "always", "pan", "baked", "neatly", "roof", "never",
)


@dataclass(frozen=True)
class ClassProfile:
    """Generation parameters for one diagnostic class."""

    n: int
    vocab_size: int = 120
    pronoun_rate: float = 0.10
    assent_rate: float = 0.02
    family_rate: float = 0.04
    filler_rate: float = 0.04
    duplicate_rate: float = 0.02
    sentences: tuple[int, int] = (5, 10)
    sentence_len: tuple[int, int] = (5, 11)
    mmse_mean: float = 27.0
    mmse_sd: float = 2.0

    def describe(self) -> str:
        return (
            f"n={self.n},vocab={self.vocab_size},pron={self.pronoun_rate:g},"
            f"assent={self.assent_rate:g},fam={self.family_rate:g},"
            f"fill={self.filler_rate:g},dup={self.duplicate_rate:g},"
            f"sent={self.sentences[0]}-{self.sentences[1]},"
            f"len={self.sentence_len[0]}-{self.sentence_len[1]},"
            f"mmse={self.mmse_mean:g}~{self.mmse_sd:g}"
        )


@dataclass(frozen=True)
class SyntheticSpec:
    """Two class profiles; the positive class defaults to higher pronoun and
    assent rates, more repetition, and a smaller vocabulary."""

    positive: ClassProfile
    negative: ClassProfile
    language: str = "en"

    @classmethod
    def default(cls, n_positive: int, n_negative: int) -> "SyntheticSpec":
        pos = ClassProfile(
            n=n_positive,
            vocab_size=40,
            pronoun_rate=0.30,
            assent_rate=0.14,
            duplicate_rate=0.10,
            sentences=(4, 9),
            sentence_len=(4, 10),
            mmse_mean=19.0,
            mmse_sd=4.0,
        )
        neg = ClassProfile(
            n=n_negative,
            vocab_size=170,
            pronoun_rate=0.06,
            assent_rate=0.005,
            duplicate_rate=0.01,
            sentences=(5, 10),
            sentence_len=(6, 12),
            mmse_mean=28.0,
            mmse_sd=1.5,
        )
        return cls(positive=pos, negative=neg)

    @classmethod
    def zero_gap(cls, n_positive: int, n_negative: int) -> "SyntheticSpec":
        """Both classes drawn from the same text distribution; downstream
        classifiers should hover at chance."""
        base = ClassProfile(n=n_positive)
        return cls(positive=base, negative=replace(base, n=n_negative))

    def planted_categories(self, min_gap: float = 0.05) -> tuple[str, ...]:
        """Dictionary categories whose generation rates differ between the
        classes by at least min_gap."""
        out = []
        if abs(self.positive.pronoun_rate - self.negative.pronoun_rate) >= min_gap:
            out.append("pronoun")
        if abs(self.positive.assent_rate - self.negative.assent_rate) >= min_gap:
            out.append("assent")
        if abs(self.positive.family_rate - self.negative.family_rate) >= min_gap:
            out.append("family")
        return tuple(out)


def _synth_text(profile: ClassProfile, rng: np.random.Generator) -> str:
    vocab = min(profile.vocab_size, len(CONTENT_POOL))
    if vocab < 1:
        raise DataError("vocab_size must be at least 1")
    p_pron = profile.pronoun_rate
    p_assent = p_pron + profile.assent_rate
    p_family = p_assent + profile.family_rate
    p_filler = p_family + profile.filler_rate
    sentences = []
    n_sent = int(rng.integers(profile.sentences[0], profile.sentences[1] + 1))
    for _ in range(n_sent):
        length = int(rng.integers(profile.sentence_len[0], profile.sentence_len[1] + 1))
        words: list[str] = []
        while len(words) < length:
            u = rng.random()
            if u < p_pron:
                w = PRONOUN_POOL[int(rng.integers(0, len(PRONOUN_POOL)))]
            elif u < p_assent:
                w = ASSENT_POOL[int(rng.integers(0, len(ASSENT_POOL)))]
            elif u < p_family:
                w = FAMILY_POOL[int(rng.integers(0, len(FAMILY_POOL)))]
            elif u < p_filler:
                w = FILLER_POOL[int(rng.integers(0, len(FILLER_POOL)))]
            else:
                # mildly skewed toward low indices for a soft frequency profile
                w = CONTENT_POOL[int(vocab * rng.random() ** 1.5)]
            words.append(w)
            if rng.random() < profile.duplicate_rate:
                words.append(w)
        sentences.append(" ".join(words) + ".")
    return " ".join(sentences)


def generate_synthetic(spec: SyntheticSpec, seed: int) -> Dataset:
    """Deterministic synthetic corpus: positive records first, then negative.

    Each record draws from its own seeded stream, so the content of record i
    does not depend on how many other records are generated.
    """
    if spec.positive.n < 1 or spec.negative.n < 1:
        raise DataError("each class must have at least 1 record")
    records: list[TranscriptRecord] = []
    idx = 0
    for diagnosis, profile in ((1, spec.positive), (0, spec.negative)):
        for _ in range(profile.n):
            rng = streams.generator(seed, streams.SYNTH, idx)
            text = _synth_text(profile, rng)
            mmse = int(np.clip(round(rng.normal(profile.mmse_mean, profile.mmse_sd)), 0, 30))
            age = int(rng.integers(52, 81))
            sex = "female" if rng.random() < 0.5 else "male"
            records.append(
                TranscriptRecord(
                    id=f"s{idx:04d}",
                    text=text,
                    diagnosis=diagnosis,
                    mmse=mmse,
                    age=age,
                    sex=sex,
                    language=spec.language,
                )
            )
            idx += 1
    name = f"synthetic(seed={seed},pos[{spec.positive.describe()}],neg[{spec.negative.describe()}])"
    return Dataset(tuple(records), name=name)
