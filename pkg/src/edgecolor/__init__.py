"""Distributed (2Δ-2)-edge colouring in a simulated LOCAL model."""

from .graph import Graph, GeneratorSpec, generate
from .pipeline import PipelineConfig, PipelineResult, run_pipeline

__all__ = ["Graph", "GeneratorSpec", "generate", "PipelineConfig", "PipelineResult", "run_pipeline"]
__version__ = "0.1.0"
