"""Structured compressive sensing with modulated unit-norm tight frames."""

from modframe.operators import LinearOperator, SubsampleSet
from modframe.sequences import GolayPair, ModulationSeq, rudin_shapiro_pair, verify_golay_pair
from modframe.models import SensingModel, build_model
from modframe.recovery import RecoveryResult, nmse, omp, subspace_pursuit
from modframe.experiments import ExperimentConfig

__all__ = [
    "LinearOperator", "SubsampleSet", "GolayPair", "ModulationSeq", "rudin_shapiro_pair",
    "verify_golay_pair", "SensingModel", "build_model", "RecoveryResult", "nmse", "omp",
    "subspace_pursuit", "ExperimentConfig",
]
