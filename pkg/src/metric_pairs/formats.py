"""Document formats: spaces, pairs, tuples, gluings, chains, brackets, profiles.

JSON is the primary format; spaces are also accepted as CSV matrices with a
header row of labels. Serialization sorts keys and keeps floats at full
precision, so identical values always produce identical bytes and every
exported document re-imports to an equal value.
"""

import csv
import io
import json

import numpy as np

from .errors import MetricPairsError
from .gluing import CrossMetric
from .hausdorff import MetricPair, MetricTuple
from .metric_core import validate_metric


class ParseError(MetricPairsError):
    def __init__(self, source, message):
        self.source = source
        super().__init__(f"{source}: {message}")


def _as_doc(source, text=None):
    if isinstance(source, dict):
        return source
    raw = text if text is not None else open(source, "r", encoding="utf-8").read()
    stripped = raw.lstrip()
    if stripped.startswith("{"):
        try:
            return json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ParseError(source, f"bad JSON at line {exc.lineno}") from None
    return {"_csv": raw}


def load_space(source, text=None):
    doc = _as_doc(source, text)
    if "_csv" in doc:
        return _space_from_csv(source, doc["_csv"])
    return space_from_doc(source, doc)


def space_from_doc(source, doc):
    try:
        labels = doc["labels"]
        dist = doc["dist"]
    except KeyError as exc:
        raise ParseError(source, f"space document missing field {exc}") from None
    tol = doc.get("tolerance")
    pseudo = bool(doc.get("pseudo", False))
    return validate_metric(np.asarray(dist, dtype=float), tol=tol, labels=labels, pseudo=pseudo)


def _space_from_csv(source, raw):
    rows = [r for r in csv.reader(io.StringIO(raw)) if r]
    if len(rows) < 2:
        raise ParseError(source, "CSV needs a header row of labels plus matrix rows")
    labels = [c.strip() for c in rows[0]]
    body = rows[1:]
    if len(body) != len(labels):
        raise ParseError(source, f"{len(labels)} labels but {len(body)} matrix rows")
    try:
        mat = [[float(c) for c in row] for row in body]
    except ValueError as exc:
        raise ParseError(source, f"non-numeric matrix entry: {exc}") from None
    if any(len(row) != len(labels) for row in mat):
        raise ParseError(source, "matrix rows must match the label count")
    return validate_metric(np.asarray(mat), labels=labels)


def space_doc(space):
    doc = {
        "labels": list(space.labels),
        "dist": [[float(x) for x in row] for row in space.dist],
        "tolerance": float(space.tol),
    }
    if space.pseudo:
        doc["pseudo"] = True
    return doc


def space_csv(space):
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(space.labels)
    for row in space.dist:
        writer.writerow([repr(float(x)) for x in row])
    return out.getvalue()


def _labels_to_subset(source, space, labels):
    try:
        return space.subset(space.index_of(lab) for lab in labels)
    except MetricPairsError as exc:
        raise ParseError(source, str(exc)) from None


def load_pair(source, text=None):
    doc = _as_doc(source, text)
    if "_csv" in doc:
        raise ParseError(source, "pair documents must be JSON")
    if "subset" not in doc or "space" not in doc:
        raise ParseError(source, "pair document needs 'space' and 'subset'")
    space = space_from_doc(source, doc["space"])
    return MetricPair(space, _labels_to_subset(source, space, doc["subset"]))


def pair_doc(pair):
    return {
        "space": space_doc(pair.space),
        "subset": [pair.space.labels[i] for i in pair.a.indices],
    }


def load_tuple(source, text=None):
    doc = _as_doc(source, text)
    if "chain" not in doc or "space" not in doc:
        raise ParseError(source, "tuple document needs 'space' and 'chain'")
    space = space_from_doc(source, doc["space"])
    chain = tuple(_labels_to_subset(source, space, level) for level in doc["chain"])
    return MetricTuple(space, chain)


def tuple_doc(mt):
    return {
        "space": space_doc(mt.space),
        "chain": [[mt.space.labels[i] for i in ref.indices] for ref in mt.chain],
    }


def load_gluing(source, text=None, left=None, right=None):
    doc = _as_doc(source, text)
    if "cross" not in doc:
        raise ParseError(source, "gluing document needs a 'cross' matrix")
    if left is None:
        if "left" not in doc:
            raise ParseError(source, "gluing document needs 'left' (no ambient supplied)")
        left = space_from_doc(source, doc["left"])
    if right is None:
        if "right" not in doc:
            raise ParseError(source, "gluing document needs 'right' (no ambient supplied)")
        right = space_from_doc(source, doc["right"])
    cross = np.asarray(doc["cross"], dtype=float)
    return CrossMetric(left, right, cross, pseudo=bool(doc.get("pseudo", False)))


def gluing_doc(glue):
    return {
        "left": space_doc(glue.left),
        "right": space_doc(glue.right),
        "cross": [[float(x) for x in row] for row in glue.cross],
        "pseudo": bool(glue.pseudo),
    }


def load_chain(source, text=None):
    from .chain_lab import build_chain

    doc = _as_doc(source, text)
    for key in ("pairs", "glues", "eps_budget"):
        if key not in doc:
            raise ParseError(source, f"chain document needs '{key}'")
    pairs = []
    for pdoc in doc["pairs"]:
        if "space" not in pdoc or "subset" not in pdoc:
            raise ParseError(source, "each chain pair needs 'space' and 'subset'")
        space = space_from_doc(source, pdoc["space"])
        pairs.append(MetricPair(space, _labels_to_subset(source, space, pdoc["subset"])))
    glues = []
    for i, gdoc in enumerate(doc["glues"]):
        # inside a chain the member spaces stand in for omitted sides
        left = pairs[i].space if "left" not in gdoc else None
        right = pairs[i + 1].space if "right" not in gdoc else None
        glues.append(load_gluing(gdoc, left=left, right=right))
    return build_chain(pairs, glues, [float(e) for e in doc["eps_budget"]])


def chain_doc(chain):
    return {
        "pairs": [pair_doc(p) for p in chain.pairs],
        "glues": [gluing_doc(g) for g in chain.glues],
        "eps_budget": [float(e) for e in chain.eps_budget],
    }


def bracket_doc(bracket):
    witness = bracket.witness
    if witness is not None:
        witness = _stringify_keys(witness)
    return {
        "lo": float(bracket.lo),
        "hi": float(bracket.hi),
        "resolution": float(bracket.resolution),
        "certificate": gluing_doc(bracket.certificate) if bracket.certificate else None,
        "witness": witness,
        "lo_reason": bracket.lo_reason,
    }


def _stringify_keys(obj):
    if isinstance(obj, dict):
        return {str(k): _stringify_keys(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_stringify_keys(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    return obj


def profile_table(profile):
    """Two-column numeric table with a kind header."""
    lines = [f"kind,{profile.kind}", "eps,value"]
    for eps, value in profile.samples:
        lines.append(f"{eps!r},{value}")
    return "\n".join(lines) + "\n"


def dumps(doc):
    """Deterministic JSON bytes for reports and documents."""
    return json.dumps(_stringify_keys(doc), sort_keys=True, indent=2) + "\n"
