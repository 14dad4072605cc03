"""Run configuration, monitors, output files and acceptance suites."""

from .analysis import MonitorReport, RunAnalysis, analyze, run_monitors
from .config import InitialSpec, SimConfig, load_config, parse_config
from .runner import RunResult, execute

__all__ = ["MonitorReport", "RunAnalysis", "analyze", "run_monitors", "InitialSpec",
           "SimConfig", "load_config", "parse_config", "RunResult", "execute"]
