"""Period map, monodromy and Torelli checks for six points on the projective line.

Configurations are dicts such as {"points": ["0", "1", "inf", "2", "3", "5"]};
results come back as dicts decoded from the library's JSON reports.
"""

import json

from . import _core
from ._core import InputError, PrecisionError, TorelliError, VerificationError

__all__ = [
    "InputError",
    "PrecisionError",
    "TorelliError",
    "VerificationError",
    "appendix_verify",
    "derive_certificate",
    "group_audit",
    "hodge_numbers",
    "moduli_equivalent",
    "period_point",
    "torelli_check",
    "validate_certificate",
]


def _text(doc):
    if doc is None or isinstance(doc, str):
        return doc
    return json.dumps(doc)


def derive_certificate(seed=1):
    return json.loads(_core.derive_certificate(seed))


def validate_certificate(certificate):
    _core.validate_certificate(_text(certificate))


def group_audit(certificate=None, seed=1):
    return json.loads(_core.group_audit(_text(certificate), seed))


def torelli_check(a, b, certificate=None, depth=6, seed=1):
    return json.loads(_core.torelli_check(_text(a), _text(b), _text(certificate), depth, seed))


def period_point(config, certificate=None, seed=1):
    return json.loads(_core.period_point(_text(config), _text(certificate), seed))


def hodge_numbers(k):
    return json.loads(_core.hodge_numbers(k))


def appendix_verify(manifest=None, seed=1, triples=100, samples=100):
    return json.loads(_core.appendix_verify(_text(manifest), seed, triples, samples))


def moduli_equivalent(a, b):
    return _core.moduli_equivalent(_text(a), _text(b))
