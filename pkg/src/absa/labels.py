"""Shared label enums.

Sentiment order (Negative, Neutral, Positive) is the column order used
everywhere a probability triple is stored as an array.
"""

from __future__ import annotations

import enum
import re


class Sentiment(enum.Enum):
    NEGATIVE = "Negative"
    NEUTRAL = "Neutral"
    POSITIVE = "Positive"

    @property
    def index(self) -> int:
        return _SENTIMENT_ORDER.index(self)

    @classmethod
    def from_index(cls, i: int) -> "Sentiment":
        return _SENTIMENT_ORDER[i]

    @classmethod
    def parse(cls, value: "str | Sentiment") -> "Sentiment":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        for member in cls:
            if member.value.lower() == key:
                return member
        raise ValueError(f"unknown sentiment label {value!r}")


_SENTIMENT_ORDER = (Sentiment.NEGATIVE, Sentiment.NEUTRAL, Sentiment.POSITIVE)
SENTIMENTS = _SENTIMENT_ORDER


class Variant(enum.Enum):
    ENGLISH = "English"
    SINHALA = "Sinhala"
    SINGLISH = "Singlish"
    CODEMIXED = "CodeMixed"
    UNKNOWN = "Unknown"

    @classmethod
    def parse(cls, value: "str | Variant") -> "Variant":
        if isinstance(value, cls):
            return value
        key = _squash(value)
        for member in cls:
            if _squash(member.value) == key:
                return member
        raise ValueError(f"unknown language variant {value!r}")


class AspectLabel(enum.Enum):
    CUSTOMER_SUPPORT = "CustomerSupport"
    LOAN_CREDIT = "LoanCredit"
    DIGITAL_BANKING = "DigitalBanking"
    TRANSACTIONS_PAYMENTS = "TransactionsPayments"
    TRUST_SECURITY = "TrustSecurity"
    GENERAL = "General"

    @property
    def title(self) -> str:
        return _ASPECT_TITLES[self]

    @classmethod
    def parse(cls, value: "str | AspectLabel") -> "AspectLabel":
        if isinstance(value, cls):
            return value
        key = _squash(value)
        for member in cls:
            if _squash(member.value) == key or _squash(member.title) == key:
                return member
        raise ValueError(f"unknown aspect label {value!r}")


# Fixed enum order is also the tie-break order for aspect assignment.
NAMED_ASPECTS = (
    AspectLabel.CUSTOMER_SUPPORT,
    AspectLabel.LOAN_CREDIT,
    AspectLabel.DIGITAL_BANKING,
    AspectLabel.TRANSACTIONS_PAYMENTS,
    AspectLabel.TRUST_SECURITY,
)

_ASPECT_TITLES = {
    AspectLabel.CUSTOMER_SUPPORT: "Customer Support",
    AspectLabel.LOAN_CREDIT: "Loan and Credit Services",
    AspectLabel.DIGITAL_BANKING: "Digital Banking Experience",
    AspectLabel.TRANSACTIONS_PAYMENTS: "Transactions and Payments",
    AspectLabel.TRUST_SECURITY: "Trust and Security",
    AspectLabel.GENERAL: "General",
}


def _squash(value) -> str:
    return re.sub(r"[^a-z]", "", str(value).lower())
