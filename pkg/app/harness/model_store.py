"""
Model file schema

A JSON document holding the antecedent partitions in their fixed order, the
rule-index convention, and one conclusion plus support flag per rule.
"""
import json
import logging
from pathlib import Path
from typing import List, Literal, Union

from pydantic import BaseModel, ValidationError, model_validator

from app.errors import ModelFileError, PartitionError
from app.fuzzy.membership import MembershipFunction, MembershipKind, Partition
from app.fuzzy.rule_base import INDEX_CONVENTION, RuleBase

# Configure logging
logger = logging.getLogger(__name__)

MODEL_FILE_VERSION = 1


class AntecedentDescriptor(BaseModel):
    name: str
    lo: float
    hi: float
    kind: MembershipKind
    centers: List[float]
    widths: List[float]

    @model_validator(mode="after")
    def _check_lengths(self) -> "AntecedentDescriptor":
        if len(self.centers) != len(self.widths):
            raise ValueError(f"antecedent '{self.name}' has {len(self.centers)} centers and {len(self.widths)} widths")
        return self

    @classmethod
    def from_partition(cls, partition: Partition) -> "AntecedentDescriptor":
        return cls(
            name=partition.variable_name,
            lo=partition.lo,
            hi=partition.hi,
            kind=partition.kind,
            centers=[float(c) for c in partition.centers],
            widths=[float(w) for w in partition.widths],
        )

    def to_partition(self) -> Partition:
        functions = tuple(MembershipFunction(kind=self.kind, center=c, width=w)
                          for c, w in zip(self.centers, self.widths))
        return Partition(variable_name=self.name, lo=self.lo, hi=self.hi, functions=functions)


class OutputDescriptor(BaseModel):
    name: str
    lo: float
    hi: float


class ModelFile(BaseModel):
    version: int = MODEL_FILE_VERSION
    relation: Literal["inverse", "direct"] = "inverse"
    index_convention: Literal["first-antecedent-fastest"] = INDEX_CONVENTION
    antecedents: List[AntecedentDescriptor]
    output: OutputDescriptor
    conclusions: List[float]
    support_flags: List[bool]

    @model_validator(mode="after")
    def _check_rule_count(self) -> "ModelFile":
        if self.version != MODEL_FILE_VERSION:
            raise ValueError(f"unsupported model file version {self.version}")
        expected = 1
        for antecedent in self.antecedents:
            expected *= len(antecedent.centers)
        if len(self.conclusions) != expected:
            raise ValueError(f"expected {expected} conclusions for the antecedent sizes, got {len(self.conclusions)}")
        if len(self.support_flags) != expected:
            raise ValueError(f"expected {expected} support flags, got {len(self.support_flags)}")
        return self

    @classmethod
    def from_rule_base(cls, rb: RuleBase, relation: str, output: OutputDescriptor) -> "ModelFile":
        return cls(
            relation=relation,
            antecedents=[AntecedentDescriptor.from_partition(p) for p in rb.antecedents],
            output=output,
            conclusions=[float(w) for w in rb.conclusions],
            support_flags=[bool(f) for f in rb.support_flags],
        )

    @property
    def variable_names(self):
        return tuple(a.name for a in self.antecedents)

    def to_rule_base(self) -> RuleBase:
        try:
            partitions = tuple(a.to_partition() for a in self.antecedents)
            return RuleBase(antecedents=partitions, conclusions=self.conclusions, support_flags=self.support_flags)
        except PartitionError as e:
            raise ModelFileError(f"Model file describes an invalid rule base: {str(e)}") from e


def save_model(model: ModelFile, path: Union[str, Path]) -> Path:
    """Write a model file with fixed key order; floats are written in shortest round-trip form"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    document = json.dumps(model.model_dump(mode="json"), indent=2)
    with open(path, "w", newline="") as f:
        f.write(document + "\n")
    logger.info(f"Saved {model.relation} model with {len(model.conclusions)} rules to {path}")
    return path


def load_model(path: Union[str, Path]) -> ModelFile:
    """
    Read and validate a model file

    Raises:
        ModelFileError: when the document is not valid JSON or breaks the schema
    """
    path = Path(path)
    with open(path) as f:
        try:
            document = json.load(f)
        except json.JSONDecodeError as e:
            raise ModelFileError(f"Model file {path} is not valid JSON: {str(e)}") from e
    try:
        model = ModelFile.model_validate(document)
    except ValidationError as e:
        raise ModelFileError(f"Invalid model file {path}: {str(e)}") from e
    logger.info(f"Loaded {model.relation} model {model.variable_names} from {path}")
    return model
