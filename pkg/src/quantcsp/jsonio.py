"""JSON encodings for values, sets, arrows, morphisms and instances.

Extended-real values serialise as ints, "p/q" strings, or "inf"/"-inf";
Boolean values as JSON booleans.  Finite sets are arrays of labels,
functions are arrays of codomain labels aligned with the domain order,
and tuple labels (power-set elements) are nested arrays.
"""

from __future__ import annotations

from fractions import Fraction

from . import csp as csp_mod
from . import linopt
from . import qmorphism as qm
from . import quantale as qv
from . import tvcsp as tv
from .errors import FormatError
from .finset import FiniteSet, FnArrow, arrow_labels, fin_range, tuple_arrow


def encode_value(v: qv.QuantaleValue):
    if v.quantale is qv.TWO:
        return bool(v.payload)
    p = v.payload
    if p == qv.POS_INF:
        return "inf"
    if p == qv.NEG_INF:
        return "-inf"
    if p.denominator == 1:
        return p.numerator
    return f"{p.numerator}/{p.denominator}"


def decode_value(obj, quantale=qv.RBAR) -> qv.QuantaleValue:
    if quantale is qv.TWO:
        if not isinstance(obj, bool):
            raise FormatError(f"expected a boolean, got {obj!r}")
        return qv.TWO.of(obj)
    if isinstance(obj, bool):
        raise FormatError("boolean value in an extended-real position")
    try:
        return qv.RBAR.of(obj)
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"bad extended-real value {obj!r}: {exc}") from None


def encode_rational(q: Fraction):
    return q.numerator if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def decode_rational(obj) -> Fraction:
    if isinstance(obj, bool):
        raise FormatError("boolean in a rational position")
    try:
        return Fraction(obj)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise FormatError(f"bad rational {obj!r}: {exc}") from None


def decode_label(obj):
    if isinstance(obj, list):
        return tuple(decode_label(x) for x in obj)
    if not isinstance(obj, (str, int)):
        raise FormatError(f"labels must be strings, ints or tuples, got {obj!r}")
    return obj


def encode_label(label):
    if isinstance(label, tuple):
        return [encode_label(x) for x in label]
    return label


def encode_finite_set(A: FiniteSet):
    return [encode_label(x) for x in A.elements]


def decode_finite_set(obj, name: str) -> FiniteSet:
    if not isinstance(obj, list):
        raise FormatError(f"{name} must be an array of labels")
    try:
        return FiniteSet(name, tuple(decode_label(x) for x in obj))
    except ValueError as exc:
        raise FormatError(str(exc), field=name) from None


def encode_arrow(f: FnArrow):
    return [encode_label(x) for x in arrow_labels(f)]


def decode_arrow(obj, dom: FiniteSet, cod: FiniteSet) -> FnArrow:
    if not isinstance(obj, list) or len(obj) != len(dom):
        raise FormatError("function table length differs from the domain size")
    try:
        return FnArrow(dom, cod, tuple(cod.index(decode_label(x)) for x in obj))
    except KeyError as exc:
        raise FormatError(str(exc)) from None


def encode_morphism(m: qm.QMorphism):
    return {
        "quantale": m.quantale.name,
        "dom": encode_finite_set(m.dom),
        "cod": encode_finite_set(m.cod),
        "entries": [[encode_arrow(f), encode_value(v)] for f, v in m.entries()],
    }


def decode_morphism(obj) -> qm.QMorphism:
    quantale = qv.quantale_by_name(obj["quantale"])
    dom = decode_finite_set(obj["dom"], "dom")
    cod = decode_finite_set(obj["cod"], "cod")
    entries = [
        (decode_arrow(table, dom, cod), decode_value(value, quantale))
        for table, value in obj.get("entries", [])
    ]
    return qm.QMorphism(quantale, dom, cod, entries)


# ---------------------------------------------------------------------------
# CSP instances and languages


def encode_csp_instance(instance: csp_mod.CspInstance):
    return {
        "variables": encode_finite_set(instance.variables),
        "domain": encode_finite_set(instance.domain),
        "constraints": [
            {
                "arity": c.arity,
                "scope": encode_arrow(c.scope),
                "relation": [
                    encode_arrow(f) for f in c.relation.support
                ],
            }
            for c in instance.constraints
        ],
    }


def decode_csp_instance(obj) -> csp_mod.CspInstance:
    try:
        V = decode_finite_set(obj["variables"], "V")
        D = decode_finite_set(obj["domain"], "D")
        constraints = []
        for c in obj.get("constraints", []):
            arity = c["arity"]
            scope = tuple(decode_label(x) for x in c["scope"])
            if len(scope) != arity:
                raise FormatError("scope length differs from arity", field="scope")
            tuples = [
                tuple(decode_label(x) for x in t) for t in c["relation"]
            ]
            rel = qm.crisp_relation(D, arity, tuples)
            constraints.append(csp_mod.make_constraint(scope, rel, V))
        return csp_mod.CspInstance(V, D, tuple(constraints))
    except KeyError as exc:
        raise FormatError(f"missing field {exc.args[0]!r}") from None


def encode_language(language: csp_mod.ConstraintLanguage):
    return {
        "domain": encode_finite_set(language.domain),
        "relations": [
            {
                "arity": len(rel.dom),
                "tuples": [encode_arrow(f) for f in rel.support],
            }
            for rel in language.relations
        ],
    }


def decode_language(obj) -> csp_mod.ConstraintLanguage:
    try:
        D = decode_finite_set(obj["domain"], "D")
        relations = []
        for r in obj.get("relations", []):
            tuples = [tuple(decode_label(x) for x in t) for t in r["tuples"]]
            relations.append(qm.crisp_relation(D, r["arity"], tuples))
        return csp_mod.ConstraintLanguage(D, tuple(relations))
    except KeyError as exc:
        raise FormatError(f"missing field {exc.args[0]!r}") from None


def encode_valued_relation(rel: qm.QMorphism):
    return {
        "arity": len(rel.dom),
        "entries": [[encode_arrow(f), encode_value(v)] for f, v in rel.entries()],
    }


def decode_valued_relation(obj, D: FiniteSet) -> qm.QMorphism:
    entries = [
        (tuple(decode_label(x) for x in t), decode_value(v))
        for t, v in obj.get("entries", [])
    ]
    return qm.valued_relation(D, obj["arity"], entries)


def encode_valued_language(relations, D: FiniteSet):
    return {
        "domain": encode_finite_set(D),
        "relations": [encode_valued_relation(rel) for rel in relations],
    }


def decode_valued_language(obj):
    try:
        D = decode_finite_set(obj["domain"], "D")
        return [decode_valued_relation(r, D) for r in obj.get("relations", [])], D
    except KeyError as exc:
        raise FormatError(f"missing field {exc.args[0]!r}") from None


# ---------------------------------------------------------------------------
# tropical instances


def encode_tvcsp_instance(instance: tv.TvcspInstance):
    return {
        "variables": encode_finite_set(instance.variables),
        "domain": encode_finite_set(instance.domain),
        "constraints": [
            {
                "arity": c.arity,
                "sigma": [
                    [encode_arrow(x), encode_value(v)] for x, v in c.sigma.entries()
                ],
                "rho": [
                    [encode_arrow(d), encode_value(v)] for d, v in c.rho.entries()
                ],
            }
            for c in instance.constraints
        ],
    }


def decode_tvcsp_instance(obj) -> tv.TvcspInstance:
    try:
        V = decode_finite_set(obj["variables"], "V")
        D = decode_finite_set(obj["domain"], "D")
        constraints = []
        for c in obj.get("constraints", []):
            arity = c["arity"]
            k = fin_range(arity)
            sigma = qm.QMorphism(
                qv.RBAR,
                k,
                V,
                [
                    (
                        tuple_arrow(tuple(decode_label(x) for x in t), V),
                        decode_value(v),
                    )
                    for t, v in c.get("sigma", [])
                ],
            )
            rho = qm.QMorphism(
                qv.RBAR,
                k,
                D,
                [
                    (
                        tuple_arrow(tuple(decode_label(x) for x in t), D),
                        decode_value(v),
                    )
                    for t, v in c.get("rho", [])
                ],
            )
            constraints.append(tv.TvcspConstraint(arity, sigma, rho))
        return tv.TvcspInstance(V, D, tuple(constraints))
    except KeyError as exc:
        raise FormatError(f"missing field {exc.args[0]!r}") from None


def decode_schedule_spec(obj):
    try:
        activities = [decode_label(a) for a in obj["activities"]]
        processing = {decode_label(k): int(v) for k, v in obj["processing"].items()}
        due = {decode_label(k): int(v) for k, v in obj["due"].items()}
        precedences = [
            (decode_label(i), decode_label(j)) for i, j in obj.get("precedences", [])
        ]
        horizon = obj.get("horizon")
        return activities, precedences, processing, due, horizon
    except KeyError as exc:
        raise FormatError(f"missing field {exc.args[0]!r}") from None


# ---------------------------------------------------------------------------
# linear instances and quasiconvexity specs


def encode_linear_instance(instance: linopt.LinearInstance):
    return {
        "variables": list(instance.variables),
        "constraints": [
            {
                "arity": c.arity,
                "sigma": [
                    [list(x), encode_rational(w)] for x, w in c.sigma
                ],
                "weights": [encode_rational(w) for w in c.rel.weights],
            }
            for c in instance.constraints
        ],
    }


def decode_linear_instance(obj) -> linopt.LinearInstance:
    try:
        variables = tuple(obj["variables"])
        constraints = []
        for c in obj.get("constraints", []):
            sigma = tuple(
                (tuple(x), decode_rational(w)) for x, w in c.get("sigma", [])
            )
            rel = linopt.LinearRel(tuple(decode_rational(w) for w in c["weights"]))
            constraints.append(linopt.LinearConstraint(c["arity"], sigma, rel))
        return linopt.LinearInstance(variables, tuple(constraints))
    except KeyError as exc:
        raise FormatError(f"missing field {exc.args[0]!r}") from None


def decode_qconvex_spec(obj):
    """An evaluator plus sample/lambda grids from a quasiconvexity spec.

    Functions are either {"kind": "polynomial", "terms": [[coeff,
    [exponents]]]} or {"kind": "linear", "weights": [...]}.
    """
    try:
        arity = int(obj["arity"])
        fn_obj = obj["function"]
        kind = fn_obj["kind"]
        if kind == "polynomial":
            terms = [
                (decode_rational(coeff), tuple(int(e) for e in exps))
                for coeff, exps in fn_obj["terms"]
            ]
            for _, exps in terms:
                if len(exps) != arity:
                    raise FormatError("exponent tuple arity mismatch", field="terms")

            def fn(point):
                total = Fraction(0)
                for coeff, exps in terms:
                    term = coeff
                    for p, e in zip(point, exps):
                        term *= Fraction(p) ** e
                    total += term
                return total

        elif kind == "linear":
            rel = linopt.LinearRel(tuple(decode_rational(w) for w in fn_obj["weights"]))
            if rel.arity != arity:
                raise FormatError("weight vector arity mismatch", field="weights")
            fn = rel.value
        else:
            raise FormatError(f"unknown function kind {kind!r}", field="kind")
        samples = obj.get("samples")
        if samples is None:
            if arity != 1:
                raise FormatError("default samples exist only for arity 1")
            samples = linopt.DEFAULT_SAMPLES
        else:
            samples = [
                tuple(decode_rational(c) for c in (p if isinstance(p, list) else [p]))
                for p in samples
            ]
            for p in samples:
                if len(p) != arity:
                    raise FormatError("sample point arity mismatch", field="samples")
        lambdas = obj.get("lambdas")
        if lambdas is None:
            lambdas = linopt.DEFAULT_LAMBDAS
        else:
            lambdas = [decode_rational(l) for l in lambdas]
        return fn, samples, lambdas
    except KeyError as exc:
        raise FormatError(f"missing field {exc.args[0]!r}") from None
