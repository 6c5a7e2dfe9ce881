"""
Market and scenario file formats.

Both are JSON documents validated through pydantic models. Diagnostics
name the JSON line/column for syntax errors and the field path for
schema or semantic errors.
"""

import json
import logging
from pathlib import Path
from typing import Annotated, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .choice import ChoiceSpec, GreedyMatroid, RankedTable
from .errors import InputError
from .model import Contract, Market

logger = logging.getLogger(__name__)


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ContractEntry(_Strict):
    id: str = Field(min_length=1)
    worker: str
    firm: str
    terms: str = ""


class TableEntry(_Strict):
    kind: Literal["table"]
    ranking: List[List[str]]


class GreedyEntry(_Strict):
    kind: Literal["greedy"]
    quota: int
    priority: List[str]
    acceptable: List[str]


ChoiceEntry = Annotated[Union[TableEntry, GreedyEntry], Field(discriminator="kind")]


class MarketFile(_Strict):
    workers: List[str]
    firms: List[str]
    contracts: List[ContractEntry]
    choices: Dict[str, ChoiceEntry]


class EventEntry(_Strict):
    kind: Literal["add-firms", "remove-workers", "combined"]
    firms: List[str] = Field(default_factory=list)
    workers: List[str] = Field(default_factory=list)


class ScenarioFile(_Strict):
    market: str
    event: EventEntry
    start: Union[Literal["worker-pessimal"], List[str]] = "worker-pessimal"
    strategy: Literal["full", "single", "random"] = "full"
    seed: int = Field(1, ge=0, lt=2**64)
    interrupt_at: Optional[int] = Field(None, ge=0)


def _field_path(loc) -> str:
    return ".".join(str(part) for part in loc)


class _JsonObject(dict):
    """A decoded JSON object that remembers keys it saw more than once"""

    def __init__(self, pairs):
        super().__init__()
        self.duplicates: List[str] = []
        for key, value in pairs:
            if key in self:
                self.duplicates.append(key)
            self[key] = value


def _duplicate_key_path(node: object, path: List[object]) -> Optional[List[object]]:
    if isinstance(node, _JsonObject) and node.duplicates:
        return path + [node.duplicates[0]]
    if isinstance(node, dict):
        children = node.items()
    elif isinstance(node, list):
        children = enumerate(node)
    else:
        return None
    for key, child in children:
        found = _duplicate_key_path(child, path + [key])
        if found:
            return found
    return None


def _parse_json(text: str, source: str) -> object:
    try:
        data = json.loads(text, object_pairs_hook=_JsonObject)
    except json.JSONDecodeError as e:
        raise InputError(e.msg, location=f"{source}:{e.lineno}:{e.colno}")
    duplicate = _duplicate_key_path(data, [])
    if duplicate:
        raise InputError(f"duplicate key {duplicate[-1]!r}", location=f"{source}:{_field_path(duplicate)}")
    return data


def _validate(model, data: object, source: str):
    try:
        return model.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        raise InputError(first["msg"], location=f"{source}:{_field_path(first['loc'])}")


def _choice_from_entry(entry: Union[TableEntry, GreedyEntry]) -> ChoiceSpec:
    if isinstance(entry, TableEntry):
        return RankedTable(tuple(frozenset(row) for row in entry.ranking))
    return GreedyMatroid(entry.quota, tuple(entry.priority), frozenset(entry.acceptable))


def market_from_dict(data: object, source: str = "market") -> Market:
    parsed: MarketFile = _validate(MarketFile, data, source)

    for field_name in ("workers", "firms"):
        values = getattr(parsed, field_name)
        if len(set(values)) != len(values):
            raise InputError("duplicate agent id", location=f"{source}:{field_name}")

    contracts: Dict[str, Contract] = {}
    for index, entry in enumerate(parsed.contracts):
        if entry.id in contracts:
            raise InputError(f"duplicate contract id {entry.id!r}", location=f"{source}:contracts.{index}.id")
        contracts[entry.id] = Contract(entry.id, entry.worker, entry.firm, entry.terms)

    try:
        return Market(
            workers=frozenset(parsed.workers),
            firms=frozenset(parsed.firms),
            contracts=contracts,
            choices={agent: _choice_from_entry(entry) for agent, entry in parsed.choices.items()},
        )
    except InputError as e:
        raise InputError(e.detail, location=f"{source}:{e.location}" if e.location else source)


def load_market(path: Union[str, Path]) -> Market:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"cannot read market file: {e.strerror}", location=str(path))
    market = market_from_dict(_parse_json(text, str(path)), source=str(path))
    logger.info(f"Loaded market {path}: {len(market.workers)} workers, {len(market.firms)} firms, {len(market.contracts)} contracts")
    return market


def _choice_to_dict(spec: ChoiceSpec) -> Dict:
    if isinstance(spec, RankedTable):
        return {"kind": "table", "ranking": [sorted(entry) for entry in spec.ranking]}
    return {
        "kind": "greedy",
        "quota": spec.quota,
        "priority": list(spec.priority),
        "acceptable": sorted(spec.acceptable),
    }


def market_to_dict(market: Market) -> Dict:
    return {
        "workers": sorted(market.workers),
        "firms": sorted(market.firms),
        "contracts": [
            {"id": c.id, "worker": c.worker, "firm": c.firm, "terms": c.terms}
            for c in market.contracts.values()
        ],
        "choices": {agent: _choice_to_dict(spec) for agent, spec in sorted(market.choices.items())},
    }


def dump_market(market: Market) -> str:
    return json.dumps(market_to_dict(market), indent=2, ensure_ascii=False) + "\n"


def save_market(market: Market, path: Union[str, Path]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_market(market), encoding="utf-8")
    logger.info(f"Saved market to {path}")


def load_scenario_file(path: Union[str, Path]) -> ScenarioFile:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"cannot read scenario file: {e.strerror}", location=str(path))
    return _validate(ScenarioFile, _parse_json(text, str(path)), str(path))
