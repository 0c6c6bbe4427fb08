"""Graph data model: labeled directed multigraphs, datasets, star-graph building.

Graphs are immutable after construction and safe to share across workers.
Node and edge ordering is preserved exactly as given (edit-path tie-breaking
depends on it).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from .errors import ParseError, ValidationError

# Label given to edges that arrive without one.
RESERVED_EDGE_LABEL = "rel"


def normalize_label(raw) -> str:
    """Trim, lowercase, and collapse internal whitespace runs to single spaces."""
    return " ".join(str(raw).split()).lower()


@dataclass(frozen=True)
class SemanticGraph:
    """A labeled directed multigraph describing one instance.

    ``nodes`` is a tuple of (node_id, label); ``edges`` a tuple of
    (src, dst, label). Parallel edges between the same (src, dst) pair are
    allowed when their labels differ; self-loops are ordinary edges.
    """

    instance_id: str
    class_pred: str
    nodes: tuple = ()
    edges: tuple = ()
    class_true: str | None = None

    def __post_init__(self):
        inst = str(self.instance_id).strip()
        if not inst:
            raise ValidationError("instance_id must be non-empty")
        cls = str(self.class_pred).strip()
        if not cls:
            raise ValidationError(f"graph {inst!r}: class_pred must be non-empty")
        ctrue = self.class_true
        if ctrue is not None:
            ctrue = str(ctrue).strip() or None

        nodes = []
        seen_ids = set()
        for entry in self.nodes:
            nid, label = entry
            nid = int(nid)
            if nid in seen_ids:
                raise ValidationError(f"graph {inst!r}: duplicate node id {nid}")
            seen_ids.add(nid)
            label = normalize_label(label)
            if not label:
                raise ValidationError(f"graph {inst!r}: node {nid} has an empty label")
            nodes.append((nid, label))
        if not nodes:
            raise ValidationError(f"graph {inst!r}: must contain at least one node")

        edges = []
        seen_edges = set()
        for index, entry in enumerate(self.edges):
            src, dst, label = entry
            src, dst = int(src), int(dst)
            for endpoint in (src, dst):
                if endpoint not in seen_ids:
                    raise ValidationError(
                        f"graph {inst!r}: edge {index} references missing node {endpoint}"
                    )
            label = normalize_label(label) or RESERVED_EDGE_LABEL
            key = (src, dst, label)
            if key in seen_edges:
                raise ValidationError(
                    f"graph {inst!r}: edge {index} duplicates ({src}, {dst}, {label!r})"
                )
            seen_edges.add(key)
            edges.append(key)

        object.__setattr__(self, "instance_id", inst)
        object.__setattr__(self, "class_pred", cls)
        object.__setattr__(self, "class_true", ctrue)
        object.__setattr__(self, "nodes", tuple(nodes))
        object.__setattr__(self, "edges", tuple(edges))

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def label_map(self) -> dict:
        """node_id -> label."""
        return dict(self.nodes)


@dataclass(frozen=True)
class GraphDataset:
    """An ordered collection of graphs with dataset-unique instance ids."""

    name: str
    graphs: tuple = ()

    def __post_init__(self):
        name = str(self.name).strip()
        if not name:
            raise ValidationError("dataset name must be non-empty")
        graphs = tuple(self.graphs)
        if not graphs:
            raise ValidationError("empty dataset")
        seen = set()
        for g in graphs:
            if not isinstance(g, SemanticGraph):
                raise ValidationError("dataset graphs must be SemanticGraph values")
            if g.instance_id in seen:
                raise ValidationError(f"duplicate instance_id {g.instance_id!r}")
            seen.add(g.instance_id)
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "graphs", graphs)

    def __len__(self):
        return len(self.graphs)

    def __iter__(self):
        return iter(self.graphs)

    def __getitem__(self, index):
        return self.graphs[index]

    def instance_ids(self) -> tuple:
        return tuple(g.instance_id for g in self.graphs)

    def index_of(self, instance_id: str) -> int:
        for i, g in enumerate(self.graphs):
            if g.instance_id == instance_id:
                return i
        raise ValidationError(f"unknown instance_id {instance_id!r}")

    def classes(self) -> tuple:
        seen = []
        for g in self.graphs:
            if g.class_pred not in seen:
                seen.append(g.class_pred)
        return tuple(seen)


@dataclass(frozen=True)
class AttributeRecord:
    """Structured attribute annotations for one entity, input to the star builder."""

    entity_label: str
    attributes: tuple = ()  # (part, feature_type, value)

    def __post_init__(self):
        entity = normalize_label(self.entity_label)
        if not entity:
            raise ValidationError("entity_label must be non-empty")
        attrs = []
        for part, ftype, value in self.attributes:
            part = normalize_label(part)
            ftype = normalize_label(ftype)
            value = normalize_label(value)
            if not part or not value or not ftype:
                raise ValidationError("attribute part, type, and value must be non-empty")
            attrs.append((part, ftype, value))
        object.__setattr__(self, "entity_label", entity)
        object.__setattr__(self, "attributes", tuple(attrs))


def _as_text(data) -> str:
    if isinstance(data, (bytes, bytearray)):
        return data.decode("utf-8")
    return data


def _load_json(data):
    text = _as_text(data)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        offset = len(text[: exc.pos].encode("utf-8"))
        raise ParseError(f"malformed JSON: {exc.msg}", offset=offset) from exc


def parse_dataset(data) -> GraphDataset:
    """Parse dataset JSON bytes into a validated GraphDataset.

    Schema: {"name": str, "graphs": [{"id", "class_true", "class_pred",
    "nodes": [{"id", "label"}], "edges": [{"src", "dst", "label"}]}]}.
    """
    doc = _load_json(data)
    if not isinstance(doc, dict) or "graphs" not in doc:
        raise ValidationError("dataset JSON must be an object with a 'graphs' list")
    raw_graphs = doc["graphs"]
    if not isinstance(raw_graphs, list) or not raw_graphs:
        raise ValidationError("empty dataset")
    graphs = []
    for g in raw_graphs:
        try:
            nodes = tuple((n["id"], n["label"]) for n in g.get("nodes", []))
            edges = tuple(
                (e["src"], e["dst"], e.get("label", "")) for e in g.get("edges", [])
            )
            graphs.append(
                SemanticGraph(
                    instance_id=g["id"],
                    class_pred=g.get("class_pred", ""),
                    nodes=nodes,
                    edges=edges,
                    class_true=g.get("class_true"),
                )
            )
        except KeyError as exc:
            raise ValidationError(f"graph entry missing required key {exc}") from exc
    return GraphDataset(name=doc.get("name", ""), graphs=tuple(graphs))


def serialize_dataset(ds: GraphDataset) -> bytes:
    """Serialize a dataset to JSON bytes; parse_dataset round-trips it exactly."""
    doc = {
        "name": ds.name,
        "graphs": [
            {
                "id": g.instance_id,
                "class_true": g.class_true,
                "class_pred": g.class_pred,
                "nodes": [{"id": nid, "label": label} for nid, label in g.nodes],
                "edges": [{"src": s, "dst": d, "label": l} for s, d, l in g.edges],
            }
            for g in ds.graphs
        ],
    }
    return json.dumps(doc, indent=2).encode("utf-8")


def parse_attribute_record(data):
    """Parse attribute-record JSON: {"id", "class_pred", "entity", "attributes":
    [{"part", "type", "value"}]}. Returns (record, instance_id, class_pred)."""
    doc = _load_json(data)
    try:
        record = AttributeRecord(
            entity_label=doc["entity"],
            attributes=tuple((a["part"], a["type"], a["value"]) for a in doc.get("attributes", [])),
        )
        return record, str(doc["id"]), str(doc["class_pred"])
    except KeyError as exc:
        raise ValidationError(f"attribute record missing required key {exc}") from exc


def build_star_graph(rec: AttributeRecord, instance_id: str, class_pred: str) -> SemanticGraph:
    """Build a star graph: central entity node, 'has' edges to each distinct part,
    and one value node per attribute linked from its part by the feature type.

    Node count is 1 + |distinct parts| + |attributes|. An empty attribute list
    yields the single central node.
    """
    nodes = [(0, rec.entity_label)]
    edges = []
    part_ids = {}
    next_id = 1
    for part, ftype, value in rec.attributes:
        if part not in part_ids:
            part_ids[part] = next_id
            nodes.append((next_id, part))
            edges.append((0, next_id, "has"))
            next_id += 1
        value_id = next_id
        next_id += 1
        nodes.append((value_id, value))
        edges.append((part_ids[part], value_id, ftype))
    return SemanticGraph(
        instance_id=instance_id,
        class_pred=class_pred,
        nodes=tuple(nodes),
        edges=tuple(edges),
    )


def dataset_content_hash(ds: GraphDataset) -> str:
    """Stable content hash used to key caches."""
    return hashlib.sha256(serialize_dataset(ds)).hexdigest()
