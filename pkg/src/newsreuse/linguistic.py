"""Sentence segmentation, tokenization, coarse POS tagging, and eligibility.

Target-corpus sentences must clear an eligibility filter (length, verb
presence, listing-header and numeric-dominance rules) before they take part
in similarity matching; source-corpus sentences are segmented but never
filtered.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Protocol

from .corpus import Article, Corpus, Role
from .errors import AnnotationMissing, RoleMismatch

MIN_TOKENS = 7          # eligibility needs strictly more than this
MAX_NUMERIC_SHARE = 0.3


class PosTag(Enum):
    ADJ = "ADJ"
    ADP = "ADP"
    ADV = "ADV"
    AUX = "AUX"
    CCONJ = "CCONJ"
    DET = "DET"
    INTJ = "INTJ"
    NOUN = "NOUN"
    NUM = "NUM"
    PART = "PART"
    PRON = "PRON"
    PROPN = "PROPN"
    PUNCT = "PUNCT"
    SCONJ = "SCONJ"
    SYM = "SYM"
    VERB = "VERB"
    X = "X"


class RejectionReason(Enum):
    TOO_SHORT = "TooShort"
    NO_VERB = "NoVerb"
    LISTING_HEADER = "ListingHeader"
    NUMERIC_DOMINANT = "NumericDominant"


@dataclass(frozen=True)
class Sentence:
    article_id: str
    idx: int
    text: str
    n_tokens: int

    @property
    def key(self) -> str:
        return f"{self.article_id}#{self.idx}"


@dataclass(frozen=True)
class Token:
    text: str
    pos: PosTag


@dataclass(frozen=True)
class AnnotatedSentence:
    sentence: Sentence
    tokens: tuple[Token, ...]
    eligible: bool
    rejection_reason: RejectionReason | None


# ---------------------------------------------------------------------------
# Segmentation

TERMINALS = frozenset(".!?")
OPENING_QUOTES = frozenset("\"'“”‘’«„¿¡(")
_LEADING_PUNCT = "\"'“”‘’«„([{"


@lru_cache(maxsize=None)
def nonbreaking_prefixes(language: str) -> frozenset[str]:
    """Load the shipped non-breaking prefix list for a language.

    Prefixes are stored one per line without the trailing period; unknown
    languages get an empty set.
    """
    name = f"{language.lower()}.txt"
    pkg = resources.files("newsreuse.data.nonbreaking_prefixes")
    try:
        text = (pkg / name).read_text(encoding="utf-8")
    except FileNotFoundError:
        return frozenset()
    prefixes = set()
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            prefixes.add(line)
    return frozenset(prefixes)


def _is_sentence_start(ch: str) -> bool:
    return ch.isupper() or ch.isdigit() or ch in OPENING_QUOTES


def _preceding_word(text: str, dot_idx: int) -> str:
    begin = dot_idx
    while begin > 0 and not text[begin - 1].isspace():
        begin -= 1
    return text[begin:dot_idx]


def split_sentences(text: str, language: str, article_id: str = "") -> list[Sentence]:
    """Split cleaned text into sentences.

    A boundary is a ``. ! ?`` followed by whitespace and then an uppercase
    letter, opening quote, or digit; a period directly after a non-breaking
    prefix (e.g. "Dr.", "U.S.") never ends a sentence. Whitespace-only text
    yields an empty list.
    """
    n = len(text)
    start = 0
    while start < n and text[start].isspace():
        start += 1
    if start == n:
        return []

    prefixes = nonbreaking_prefixes(language)
    cuts: list[tuple[int, int]] = []  # (end of sentence, start of next)
    for i in range(start, n):
        ch = text[i]
        if ch not in TERMINALS:
            continue
        j = i + 1
        if j >= n or not text[j].isspace():
            continue
        k = j
        while k < n and text[k].isspace():
            k += 1
        if k >= n or not _is_sentence_start(text[k]):
            continue
        if ch == ".":
            word = _preceding_word(text, i)
            if word in prefixes or word.lstrip(_LEADING_PUNCT) in prefixes:
                continue
        cuts.append((i + 1, k))

    sentences: list[Sentence] = []
    seg_start = start
    for end, nxt in cuts:
        sentences.append(_make_sentence(article_id, len(sentences), text[seg_start:end]))
        seg_start = nxt
    sentences.append(_make_sentence(article_id, len(sentences), text[seg_start:].rstrip()))
    return sentences


def _make_sentence(article_id: str, idx: int, text: str) -> Sentence:
    return Sentence(article_id=article_id, idx=idx, text=text, n_tokens=count_word_tokens(tokenize(text)))


def segment_article(article: Article) -> list[Sentence]:
    return split_sentences(article.body, article.language, article.id)


def segment_corpus(corpus: Corpus) -> dict[str, list[Sentence]]:
    """Segment every article; keys are article ids."""
    return {article.id: segment_article(article) for article in corpus.articles}


# ---------------------------------------------------------------------------
# Tokenization

# Word tokens are maximal alphanumeric runs, apostrophes only word-internal;
# any other non-space character is its own token.
TOKEN_RE = re.compile(r"[^\W_]+(?:['’][^\W_]+)*|\S")

_SYM_CHARS = frozenset("$%§€£¥©®™+=<>|^~")


def tokenize(text: str) -> list[str]:
    return TOKEN_RE.findall(text)


def is_word_token(token: str) -> bool:
    return bool(token) and token[0].isalnum()


def count_word_tokens(tokens: Iterable[str]) -> int:
    """Token count for eligibility purposes: punctuation excluded."""
    return sum(1 for t in tokens if is_word_token(t))


# ---------------------------------------------------------------------------
# Annotators

class Annotator(Protocol):
    def tag(self, tokens: list[str], language: str, key: str | None = None) -> list[PosTag]:
        ...


AUX_WORDS = frozenset("""
am is are was were be been being have has had having do does did done doing
will would shall should can could may might must ought cannot
don't doesn't didn't isn't aren't wasn't weren't hasn't haven't hadn't
won't wouldn't shan't shouldn't can't couldn't mustn't ain't
""".split())

PRON_WORDS = frozenset("""
i you he she it we they me him us them mine yours hers ours theirs
myself yourself himself herself itself ourselves yourselves themselves
who whom whose someone anyone everyone somebody anybody everybody nobody
something anything everything nothing
""".split())

DET_WORDS = frozenset("""
a an the this that these those each every either neither some any no another
such both all several many much few little other same what which
my your his her its our their
""".split())

ADP_WORDS = frozenset("""
of in to on at by with from for about against between into through during
before after under over across behind beyond near within without along
around among amid despite per via upon toward towards off onto out inside
outside since until
""".split())

ADV_WORDS = frozenset("""
also very too so now then here there when where why how however still yet
already again often never always sometimes usually soon later earlier
recently meanwhile instead moreover nevertheless rather quite almost nearly
just even only below above abroad ahead away back forward home overseas
today tomorrow yesterday once twice perhaps maybe together apart further
""".split())

CCONJ_WORDS = frozenset("and or but nor plus".split())

SCONJ_WORDS = frozenset("because although though while if unless whether whereas as".split())

PART_WORDS = frozenset(["not"])

INTJ_WORDS = frozenset("yes oh hey wow alas".split())

NUMBER_WORDS = frozenset("""
zero one two three four five six seven eight nine ten eleven twelve thirteen
fourteen fifteen sixteen seventeen eighteen nineteen twenty thirty forty
fifty sixty seventy eighty ninety hundred thousand million billion trillion
""".split())

# Common newswire verb lemmas; inflected forms are matched by suffix
# stripping below.
VERB_LEMMAS = frozenset("""
accept accuse acknowledge add address admit advance advise affect agree aim
allege allow analyze announce answer appear appoint approve argue arrest
arrive ask assert assess attack attend avoid award back ban beat become
begin believe block bomb boost bring broadcast build buy call cancel capture
carry cause celebrate challenge change charge check cite claim close come
condemn confirm connect consider contest continue control cost create
criticize cut damage debate decide declare decline defeat define delay
deliver demand demonstrate deny depart describe design destroy detain
develop die direct discover discuss dispute distribute divide drive drop
elect emphasize end endorse erupt estimate evacuate examine expect explain
face fall fear fight find finish flood fly follow forecast fund gain gather get
give go govern grant grow halt handle happen head hear help highlight hire
hit hold honor hope host hurt identify impose improve include increase
injure insist instruct interpret invest investigate involve issue join keep
kill know launch lead learn leave link listen live look lose maintain make
manage march mark measure meet mention merge monitor move name need
negotiate nominate note obtain occur offer open oppose order organize
oversee own pay permit plan play pledge postpone praise predict prepare
press prevent print probe proceed produce project promise propose protest
provide publish pull push quit quote raise rally reach react read receive
recommend record recover reduce refer refuse regard reject relate release
remain report request require rescue resign resist resolve respond restore
resume return reveal review rise rule run say secure see seek seize sell
send serve settle share shoot show sign solve speak spend split spread
start state stay stop stress strike study suffer suggest support survive
suspend take talk teach tell test thank think threaten travel treat try
turn understand unite urge use view visit vote vow walk want warn watch
welcome win withdraw work worry wound write
""".split())

IRREGULAR_VERB_FORMS = frozenset("""
went gone said saw seen came made took taken got gotten gave given found
thought brought bought fought caught taught sought held met left felt kept
led paid rose risen fell fallen flew flown grew grown drew drawn knew known
threw thrown wore worn broke broken chose chosen spoke spoken stole stolen
woke woken drove driven wrote written ate eaten beaten began begun ran rang
rung sang sung sank sunk won lost sent spent built dealt meant lent bent
shot shut set put let stood understood withdrew withdrawn struck swore
sworn tore torn bore borne laid lay lain slid hid hidden heard became
overcame arose arisen froze frozen forbade forbidden forgave forgiven
forgot forgotten bound fed fled hung sold told shook shaken stuck swept
swung wept
""".split())


def _inflection_stems(word: str) -> list[str]:
    stems = []
    if word.endswith("ies") and len(word) > 4:
        stems.append(word[:-3] + "y")
    if word.endswith("es") and len(word) > 3:
        stems.append(word[:-2])
    if word.endswith("s") and len(word) > 2:
        stems.append(word[:-1])
    if word.endswith("ied") and len(word) > 4:
        stems.append(word[:-3] + "y")
    if word.endswith("ed") and len(word) > 3:
        stems.append(word[:-2])
        stems.append(word[:-1])
        if len(word) > 4 and word[-3] == word[-4]:
            stems.append(word[:-3])
    if word.endswith("ing") and len(word) > 4:
        stems.append(word[:-3])
        stems.append(word[:-3] + "e")
        if len(word) > 5 and word[-4] == word[-5]:
            stems.append(word[:-4])
    return stems


def _verb_match(word: str) -> bool:
    if word in VERB_LEMMAS or word in IRREGULAR_VERB_FORMS:
        return True
    return any(stem in VERB_LEMMAS for stem in _inflection_stems(word))


class HeuristicTagger:
    """English closed-class lexicons plus a common-verb lexicon.

    Approximate by design: unknown alphabetic tokens default to NOUN, so the
    tagger is useful only for the eligibility rules (verb presence, numeric
    share), not as a general POS tagger. For non-English text, optional
    per-language lexicon files ``<lang>_verbs.txt`` / ``<lang>_aux.txt`` in
    ``lexicon_dir`` mark verbs and auxiliaries; everything else maps to X.
    """

    def __init__(self, lexicon_dir: str | Path | None = None):
        self._lexicon_dir = Path(lexicon_dir) if lexicon_dir else None
        self._extra: dict[tuple[str, str], frozenset[str]] = {}

    def _load_extra(self, language: str, kind: str) -> frozenset[str]:
        cache_key = (language, kind)
        if cache_key not in self._extra:
            words: frozenset[str] = frozenset()
            if self._lexicon_dir is not None:
                candidate = self._lexicon_dir / f"{language}_{kind}.txt"
                if candidate.exists():
                    words = frozenset(
                        w.strip().lower()
                        for w in candidate.read_text(encoding="utf-8").splitlines()
                        if w.strip()
                    )
            self._extra[cache_key] = words
        return self._extra[cache_key]

    def tag(self, tokens: list[str], language: str, key: str | None = None) -> list[PosTag]:
        first_word = next((i for i, t in enumerate(tokens) if is_word_token(t)), -1)
        tags = []
        for i, tok in enumerate(tokens):
            if not is_word_token(tok):
                tags.append(PosTag.SYM if tok in _SYM_CHARS else PosTag.PUNCT)
            elif language == "en":
                tags.append(self._tag_english(tok, i == first_word))
            else:
                tags.append(self._tag_other(tok, language))
        return tags

    def _tag_english(self, tok: str, is_first: bool) -> PosTag:
        low = tok.lower().replace("’", "'")
        if low[0].isdigit() or low[0].isnumeric():
            return PosTag.NUM
        if low in AUX_WORDS:
            return PosTag.AUX
        if low in PRON_WORDS:
            return PosTag.PRON
        if low in DET_WORDS:
            return PosTag.DET
        if low in ADP_WORDS:
            return PosTag.ADP
        if low in ADV_WORDS:
            return PosTag.ADV
        if low in CCONJ_WORDS:
            return PosTag.CCONJ
        if low in SCONJ_WORDS:
            return PosTag.SCONJ
        if low in PART_WORDS:
            return PosTag.PART
        if low in INTJ_WORDS:
            return PosTag.INTJ
        if low in NUMBER_WORDS:
            return PosTag.NUM
        if _verb_match(low):
            return PosTag.VERB
        if tok[0].isupper() and not is_first:
            return PosTag.PROPN
        if tok[0].isalpha():
            return PosTag.NOUN
        return PosTag.X

    def _tag_other(self, tok: str, language: str) -> PosTag:
        low = tok.lower()
        if low[0].isdigit() or low[0].isnumeric():
            return PosTag.NUM
        if low in self._load_extra(language, "aux"):
            return PosTag.AUX
        if low in self._load_extra(language, "verbs"):
            return PosTag.VERB
        return PosTag.X


class ExternalAnnotations:
    """Pre-computed coarse tags joined on article id and sentence index.

    The JSONL file carries one row per sentence:
    ``{"article_id": "...", "sentence_idx": 0, "tags": ["NOUN", ...]}``.
    Tag lists shorter than the token list are padded with X; extra tags are
    ignored.
    """

    def __init__(self, path: str | Path):
        self._tags: dict[tuple[str, int], list[PosTag]] = {}
        with Path(path).open("r", encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                row = json.loads(line)
                tags = [self._coerce(t) for t in row.get("tags", [])]
                self._tags[(str(row["article_id"]), int(row["sentence_idx"]))] = tags

    @staticmethod
    def _coerce(raw: str) -> PosTag:
        try:
            return PosTag(str(raw).upper())
        except ValueError:
            return PosTag.X

    def tag(self, tokens: list[str], language: str, key: str | None = None) -> list[PosTag]:
        if key is None:
            raise AnnotationMissing("external annotations require a sentence key")
        article_id, _, idx = key.rpartition("#")
        lookup = (article_id, int(idx))
        if lookup not in self._tags:
            raise AnnotationMissing(f"no external annotation for sentence {key!r}")
        tags = list(self._tags[lookup][: len(tokens)])
        tags.extend([PosTag.X] * (len(tokens) - len(tags)))
        return tags


def annotate(
    tokens: list[str],
    language: str,
    annotator: Annotator,
    key: str | None = None,
) -> list[Token]:
    """Tag every token; unknown tokens come back as X."""
    tags = annotator.tag(tokens, language, key)
    return [Token(text=t, pos=g) for t, g in zip(tokens, tags)]


# ---------------------------------------------------------------------------
# Eligibility

def eligibility(text: str, tokens: Iterable[Token]) -> tuple[bool, RejectionReason | None]:
    """Apply the eligibility rules in order; the first failure wins.

    (a) strictly more than 7 non-punctuation tokens, (b) at least one
    VERB/AUX tag, (c) no trailing colon (listing header), (d) fewer than 30%
    of non-punctuation tokens numeric.
    """
    tokens = list(tokens)
    words = [t for t in tokens if is_word_token(t.text)]
    if len(words) <= MIN_TOKENS:
        return False, RejectionReason.TOO_SHORT
    if not any(t.pos in (PosTag.VERB, PosTag.AUX) for t in tokens):
        return False, RejectionReason.NO_VERB
    if text.rstrip().endswith(":"):
        return False, RejectionReason.LISTING_HEADER
    numeric = sum(1 for t in words if t.pos is PosTag.NUM or t.text[0].isdigit())
    if numeric >= MAX_NUMERIC_SHARE * len(words):
        return False, RejectionReason.NUMERIC_DOMINANT
    return True, None


def is_eligible(annotated: AnnotatedSentence) -> tuple[bool, RejectionReason | None]:
    return eligibility(annotated.sentence.text, annotated.tokens)


def annotate_sentence(sentence: Sentence, language: str, annotator: Annotator) -> AnnotatedSentence:
    tokens = annotate(tokenize(sentence.text), language, annotator, key=sentence.key)
    ok, reason = eligibility(sentence.text, tokens)
    return AnnotatedSentence(sentence=sentence, tokens=tuple(tokens), eligible=ok, rejection_reason=reason)


def annotate_corpus(corpus: Corpus, annotator: Annotator) -> list[AnnotatedSentence]:
    """Segment and annotate every sentence of every article, verdicts included."""
    out: list[AnnotatedSentence] = []
    for article in corpus.articles:
        for sentence in segment_article(article):
            out.append(annotate_sentence(sentence, article.language, annotator))
    return out


def filter_target_sentences(corpus: Corpus, annotator: Annotator) -> list[AnnotatedSentence]:
    """Return the eligible sentences of a target corpus.

    Sentence indices are preserved from the full segmentation, so positional
    analysis downstream still sees each sentence's true place in its article.
    """
    if corpus.role is not Role.TARGET:
        raise RoleMismatch(f"eligibility filter applies to the target corpus, got {corpus.role.value!r}")
    return [ann for ann in annotate_corpus(corpus, annotator) if ann.eligible]
