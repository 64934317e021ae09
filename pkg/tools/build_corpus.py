"""Regenerate the bundled review corpora under src/absa/data/.

Reviews are template-built so that every label is unambiguous: a subject
phrase names the aspect and a predicate carries the sentiment. Output is
a pure function of the seeds below.

    python3 tools/build_corpus.py
"""

from __future__ import annotations

import json
import random
from pathlib import Path

DATA = Path(__file__).resolve().parent.parent / "src" / "absa" / "data"

ASPECTS = ("CustomerSupport", "LoanCredit", "DigitalBanking", "TransactionsPayments", "TrustSecurity")
SENTIMENTS = ("Negative", "Neutral", "Positive")

SUBJECTS = {
    "English": {
        "CustomerSupport": ["customer service", "the support staff", "the call center", "the branch staff",
                            "the hotline agent", "customer support", "the help desk", "the relationship manager"],
        "LoanCredit": ["the loan approval", "the housing loan", "the interest rate", "the credit limit",
                       "the loan officer", "the leasing process", "the personal loan", "the mortgage terms"],
        "DigitalBanking": ["the mobile app", "the app login", "online banking", "the website",
                           "internet banking", "the latest app update", "the login page", "the digital wallet"],
        "TransactionsPayments": ["the fund transfer", "bill payment", "the atm withdrawal", "the card payment",
                                 "the money transfer", "the transaction fee", "the cash deposit", "the remittance"],
        "TrustSecurity": ["account security", "fraud protection", "the otp verification", "data privacy",
                          "the security alerts", "the bank's reputation", "account safety", "the fraud team"],
    },
    "Singlish": {
        "CustomerSupport": ["customer service eka", "staff eka", "call center eka", "branch eke aya",
                            "support eka", "service eka"],
        "LoanCredit": ["loan eka", "interest rate eka", "leasing eka", "loan approval eka",
                       "housing loan eka", "credit limit eka"],
        "DigitalBanking": ["app eka", "online banking eka", "login eka", "website eka",
                           "app update eka", "internet banking eka"],
        "TransactionsPayments": ["transfer eka", "bill payment eka", "atm eka", "card payment eka",
                                 "deposit eka", "transaction fee eka"],
        "TrustSecurity": ["security eka", "otp eka", "fraud alert eka", "account security eka",
                          "privacy eka", "verification eka"],
    },
    "Sinhala": {
        "CustomerSupport": ["පාරිභෝගික සේවාව", "කාර්ය මණ්ඩලය", "ඇමතුම් මධ්‍යස්ථානය", "ශාඛාවේ සේවාව"],
        "LoanCredit": ["ණය අනුමැතිය", "පොලී අනුපාතය", "ණය ක්‍රියාවලිය", "ලීසිං ක්‍රියාවලිය"],
        "DigitalBanking": ["ජංගම යෙදුම", "ඔන්ලයින් බැංකුව", "යෙදුමේ ඇතුල්වීම", "වෙබ් අඩවිය"],
        "TransactionsPayments": ["මුදල් හුවමාරුව", "බිල් ගෙවීම", "තැන්පතු ක්‍රියාවලිය", "කාඩ් ගෙවීම"],
        "TrustSecurity": ["ගිණුම් ආරක්ෂාව", "වංචා ආරක්ෂාව", "රහස්‍යභාවය", "ආරක්ෂක පණිවිඩ"],
    },
    "CodeMixed": {
        "CustomerSupport": ["Customer service", "Support staff", "Call center", "Branch staff"],
        "LoanCredit": ["Loan approval", "Interest rate", "Housing loan", "Leasing"],
        "DigitalBanking": ["Mobile app", "App login", "Online banking", "Website"],
        "TransactionsPayments": ["Fund transfer", "Bill payment", "ATM withdrawal", "Card payment"],
        "TrustSecurity": ["Account security", "Fraud protection", "OTP verification", "Data privacy"],
    },
}

PREDICATES = {
    "English": {
        "Positive": ["is excellent", "was very helpful", "works perfectly", "is fast and reliable",
                     "was smooth and quick", "made me very happy", "is really great", "was outstanding"],
        "Negative": ["is terrible", "was very slow", "keeps failing", "is frustrating and useless",
                     "caused huge delays", "was a disappointing experience", "is the worst", "was unacceptable"],
        "Neutral": ["is okay", "was average", "works as expected", "is neither good nor bad",
                    "was standard", "is ordinary", "was the usual procedure", "is similar to other banks"],
    },
    "Singlish": {
        "Positive": ["hari hodai", "godak hodai", "supiri", "ela", "niyamai", "patta",
                     "hondata wada karanawa", "ikmanata wenawa"],
        "Negative": ["lag wenawa", "hari naraka", "wada karanne na", "godak parakku", "kela",
                     "epa wenawa", "maha karadarayak", "godak slow"],
        "Neutral": ["sadharanai", "normal widiyata wenawa", "wisheshayak na", "hamadama wage",
                    "samanyai", "ehema thamai", "wenasak na", "madhyasthai"],
    },
    "Sinhala": {
        "Positive": ["හොඳයි", "ඉතා හොඳයි", "කාර්යක්ෂමයි", "විශිෂ්ටයි", "සතුටුදායකයි", "වේගවත් සහ කාර්යක්ෂම"],
        "Negative": ["නරකයි", "ඉතා නරකයි", "අසාර්ථකයි", "ප්‍රමාදයි", "කරදරයි", "අපව නොසලකා හරිනවා"],
        "Neutral": ["සාමාන්‍යයි", "සාමාන්‍ය ලෙස ක්‍රියා කරයි", "වෙනසක් නැහැ", "සාමාන්‍ය මට්ටමේ",
                    "සාමාන්‍ය පරිදි", "එලෙසමයි"],
    },
    "CodeMixed": {
        "Positive": ["ගොඩක් හොඳයි", "හොඳයි", "කාර්යක්ෂමයි", "super වගේ", "fast සහ හොඳයි"],
        "Negative": ["ගොඩක් නරකයි", "ප්‍රමාදයි", "අසාර්ථකයි", "ගොඩක් slow", "lag වෙනවා"],
        "Neutral": ["සාමාන්‍යයි", "normal වගේ", "වෙනසක් නැහැ", "average මට්ටමේ", "ok සාමාන්‍ය පරිදි"],
    },
}

PREFIXES = {
    "English": ["", "", "honestly ", "overall ", "i think ", "this month "],
    "Singlish": ["", "", "me bank eke ", "ane ", "mata nam "],
    "Sinhala": ["", "මෙම බැංකුවේ ", "අපේ බැංකුවේ "],
    "CodeMixed": ["", "", "මේ bank එකේ "],
}
ENDINGS = ["", ".", ".", "!", "!!"]
FILLERS = {
    "English": ["i have banked with them for years", "i visited last week", "my salary goes there"],
    "Singlish": ["mama awurudu gana me bank eke", "giya sathiye giya"],
}
EXTRA_NEGATIVE = [
    ("LoanCredit", "English", "loan approval delays were painful"),
    ("LoanCredit", "English", "so many loan approval delays"),
    ("LoanCredit", "English", "loan approval delays again and again"),
    ("DigitalBanking", "Singlish", "app eka lag wenawa"),
]


def _compose(rng: random.Random, variant: str, aspect: str, sentiment: str) -> str:
    subject = rng.choice(SUBJECTS[variant][aspect])
    pred = rng.choice(PREDICATES[variant][sentiment])
    text = rng.choice(PREFIXES[variant]) + subject + " " + pred + rng.choice(ENDINGS)
    if variant in FILLERS and rng.random() < 0.2:
        text = text.rstrip(".!") + ". " + rng.choice(FILLERS[variant])
    if variant == "English" and rng.random() < 0.3:
        text = text[0].upper() + text[1:]
    if sentiment != "Neutral" and rng.random() < 0.1:
        text = text.rstrip(".") + "!!!"
    return text


def build_main(seed: int = 20240601) -> list[dict]:
    """600 reviews, 200 per sentiment, 120 per aspect, 240 English and 120 per other variant."""
    rng = random.Random(seed)
    per_cell = (("English", 16), ("Singlish", 8), ("Sinhala", 8), ("CodeMixed", 8))
    rows = []
    extras = list(EXTRA_NEGATIVE)
    for sentiment in SENTIMENTS:
        for aspect in ASPECTS:
            for variant, n in per_cell:
                for _ in range(n):
                    text = _compose(rng, variant, aspect, sentiment)
                    if sentiment == "Negative":
                        for j, (a, v, t) in enumerate(extras):
                            if a == aspect and v == variant:
                                text = t
                                del extras[j]
                                break
                    rows.append({"text": text, "variant": variant, "aspect": aspect, "sentiment": sentiment})
    rng.shuffle(rows)
    return [{"id": f"r{i:04d}", **r, "source": "synthetic"} for i, r in enumerate(rows)]


def build_toy_english(seed: int = 7) -> list[dict]:
    """100 English reviews at 37/33/30 positive/neutral/negative."""
    rng = random.Random(seed)
    counts = {"Positive": 37, "Neutral": 33, "Negative": 30}
    rows = []
    for sentiment, n in counts.items():
        for k in range(n):
            aspect = ASPECTS[k % 5]
            rows.append({"text": _compose(rng, "English", aspect, sentiment), "variant": "English",
                         "aspect": aspect, "sentiment": sentiment})
    rng.shuffle(rows)
    return [{"id": f"t{i:03d}", **r, "source": "synthetic"} for i, r in enumerate(rows)]


def build_singlish_slice(seed: int = 99) -> list[dict]:
    """Held-out Singlish reviews, 20 per sentiment, 4 per (sentiment, aspect)."""
    rng = random.Random(seed)
    rows = []
    for sentiment in SENTIMENTS:
        for aspect in ASPECTS:
            for _ in range(4):
                rows.append({"text": _compose(rng, "Singlish", aspect, sentiment), "variant": "Singlish",
                             "aspect": aspect, "sentiment": sentiment})
    rng.shuffle(rows)
    return [{"id": f"s{i:03d}", **r, "source": "synthetic"} for i, r in enumerate(rows)]


def build_unlabeled(n: int = 1200, seed: int = 31) -> list[str]:
    rng = random.Random(seed)
    variants = ("English", "English", "Singlish", "Sinhala", "CodeMixed")
    return [
        _compose(rng, rng.choice(variants), rng.choice(ASPECTS), rng.choice(SENTIMENTS))
        for _ in range(n)
    ]


def _write_jsonl(path: Path, rows: list[dict]) -> None:
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for r in rows:
            fh.write(json.dumps(r, ensure_ascii=False) + "\n")


def main() -> None:
    DATA.mkdir(parents=True, exist_ok=True)
    _write_jsonl(DATA / "corpus.jsonl", build_main())
    _write_jsonl(DATA / "toy_english.jsonl", build_toy_english())
    _write_jsonl(DATA / "singlish_slice.jsonl", build_singlish_slice())
    (DATA / "unlabeled.txt").write_text("\n".join(build_unlabeled()) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
