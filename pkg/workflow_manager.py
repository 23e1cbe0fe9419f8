import logging
from typing import Any, Dict, List, Optional, TypedDict

from langgraph.graph import StateGraph

from agents.average_agent import AverageAgent
from agents.bennett_agent import BennettAgent
from agents.certification_agent import CertificationAgent
from agents.lemma_agent import LemmaAgent
from agents.value_agent import ValueAgent
from core.constants import Constants, compute_constants
from core.dimensions import DimensionCalculator
from core.oracle import NewformOracle
from utils.config import ScanConfig
from utils.scanner import LevelScanner

logger = logging.getLogger("ReproductionWorkflow")

PUBLISHED_CONSTANTS = {"A0plus": 0.373956, "A1star": 0.322634, "A1plus": 0.125487, "B0": 0.444301, "B1": 0.652036}
LEVELS_AT_100 = [
    1213, 1331, 2169, 2583, 2662, 2745, 3208, 3232, 3465, 3608, 4040, 4302, 4338, 4772, 4804, 4848,
    5084, 5092, 5166, 5252, 5324, 5490, 5572, 5904, 6336, 6820, 6930, 7056, 7188, 7212, 7920, 8052,
    8484, 8652, 8676, 8940, 9060, 10332, 10980, 13860,
]
MISSING_GENUS_VALUES = [
    150, 180, 210, 286, 304, 312, 336, 338, 348, 350, 480, 536, 570, 598, 606, 620, 666, 678, 706,
    730, 756, 780, 798, 850, 876, 896, 906, 916, 970,
]


class StepOutcome(TypedDict):
    passed: bool
    summary: str


class ReproductionState(TypedDict, total=False):
    quick: bool
    constants: StepOutcome
    oracle: StepOutcome
    identities: StepOutcome
    bennett: StepOutcome
    lemmas: StepOutcome
    enumeration: StepOutcome
    coverage: StepOutcome
    missing_values: StepOutcome
    averages: StepOutcome
    rho_floor: StepOutcome


STEPS = ["constants", "oracle", "identities", "bennett", "lemmas", "enumeration",
         "coverage", "missing_values", "averages", "rho_floor"]


def _outcome(passed: bool, summary: str) -> StepOutcome:
    logger.info(f"{'✅' if passed else '❌'} {summary}")
    return {"passed": bool(passed), "summary": summary}


class ReproductionWorkflow:
    def __init__(self, config: Optional[ScanConfig] = None, constants: Optional[Constants] = None):
        """
        Initialize the reproduction workflow with all required agents.

        Args:
            config: Scan configuration shared by every agent
            constants: Precomputed constants; computed in the first step when omitted
        """
        self.config = config or ScanConfig()
        logger.info(f"Initializing ReproductionWorkflow with threads={self.config.threads}")
        self.calculator = DimensionCalculator(config=self.config)
        self.scanner = LevelScanner(self.calculator, self.config)
        self.oracle = NewformOracle(self.calculator, self.scanner)
        self.constants = constants
        self.certification_agent = CertificationAgent(self.calculator, self.scanner, constants, self.config)
        self.bennett_agent = BennettAgent(self.calculator, self.scanner)
        self.lemma_agent = LemmaAgent(self.calculator, self.scanner, constants, self.config)
        self.value_agent = ValueAgent(self.calculator, self.scanner, self.certification_agent)
        self.average_agent = AverageAgent(self.calculator, self.scanner, constants, self.config)
        logger.info("All agents initialized successfully")

        self.graph = self._build_graph()

    def _build_graph(self):
        """Build the workflow graph, one node per reproduction step in a fixed chain."""
        workflow = StateGraph(ReproductionState)
        handlers = {
            "constants": self._constants_step,
            "oracle": self._oracle_step,
            "identities": self._identities_step,
            "bennett": self._bennett_step,
            "lemmas": self._lemma_step,
            "enumeration": self._enumeration_step,
            "coverage": self._coverage_step,
            "missing_values": self._missing_values_step,
            "averages": self._averages_step,
            "rho_floor": self._rho_floor_step,
        }
        for name in STEPS:
            workflow.add_node(f"{name}_step", handlers[name])
        for current, following in zip(STEPS, STEPS[1:]):
            workflow.add_edge(f"{current}_step", f"{following}_step")
        workflow.set_entry_point(f"{STEPS[0]}_step")
        workflow.set_finish_point(f"{STEPS[-1]}_step")
        return workflow.compile()

    def _share_constants(self, constants: Constants) -> None:
        self.constants = constants
        for agent in (self.certification_agent, self.lemma_agent, self.average_agent):
            agent._constants = constants

    def _constants_step(self, state: Dict[str, Any]) -> Dict[str, Any]:
        logger.info("🧮 Starting Constants Step")
        if self.constants is None:
            self._share_constants(compute_constants(self.config.euler_cutoff_prime))
        else:
            self._share_constants(self.constants)
        values = {name: getattr(self.constants, name) for name in PUBLISHED_CONSTANTS}
        bad = [name for name, expected in PUBLISHED_CONSTANTS.items() if abs(values[name].value - expected) > 5e-7 + values[name].radius]
        summary = ", ".join(f"{name}={values[name].formatted()}" for name in PUBLISHED_CONSTANTS)
        return {"constants": _outcome(not bad, f"constants {summary}")}

    def _oracle_step(self, state: Dict[str, Any]) -> Dict[str, Any]:
        logger.info("🔍 Starting Oracle Step")
        quick = state.get("quick", False)
        gamma0 = self.oracle.consistency_scan("gamma0", 2000 if quick else 20000, range(2, 25, 2))
        gamma1 = self.oracle.consistency_scan("gamma1", 500 if quick else 5000, range(2, 14))
        count = len(gamma0.mismatches) + len(gamma1.mismatches)
        return {"oracle": _outcome(count == 0, f"oracle: {count} mismatches")}

    def _identities_step(self, state: Dict[str, Any]) -> Dict[str, Any]:
        logger.info("🔗 Starting Identities Step")
        report = self.lemma_agent.verify_convolution_identities(10_000)
        return {"identities": _outcome(not report.failures, f"identities: {len(report.failures)} failing")}

    def _bennett_step(self, state: Dict[str, Any]) -> Dict[str, Any]:
        logger.info("📐 Starting Bennett Step")
        quick = state.get("quick", False)
        limit = 10_000 if quick else 100_000
        bound = self.bennett_agent.verify_sharp_bound(limit)
        expected = self._equality_levels(limit)
        power = self.bennett_agent.verify_power_of_two(99 if quick else 999, range(4, 9), [2, 4, 6])
        residual = self.bennett_agent.verify_bennett_residual()
        passed = (not bound.violations and bound.equality_set == expected
                  and not power.failures and not residual.violations)
        return {"bennett": _outcome(passed, f"bennett: {len(bound.violations)} violations, "
                                            f"{len(power.failures)} power-of-two failures, "
                                            f"{len(residual.violations)} residual violations")}

    def _equality_levels(self, limit: int) -> List[int]:
        sieve = self.calculator.toolkit.sieve_covering(limit)
        primes = [p for p in range(11, limit + 1, 12) if sieve.is_prime(p)]
        return sorted(set(primes + ([35] if limit >= 35 else [])))

    def _lemma_step(self, state: Dict[str, Any]) -> Dict[str, Any]:
        logger.info("📏 Starting Lemma Step")
        report = self.lemma_agent.run_suite(10_000 if state.get("quick", False) else 100_000)
        partial = self.lemma_agent.zeta2_partial_products()
        failed = report.failed + ([partial.name] if partial.violations else [])
        return {"lemmas": _outcome(not failed, f"lemmas: failing {failed or 'none'}")}

    def _enumeration_step(self, state: Dict[str, Any]) -> Dict[str, Any]:
        logger.info("📋 Starting Enumeration Step")
        result = self.certification_agent.enumerate_small_dim("g0plus", 2, 100)
        at_100 = [n for n, v in result.levels if v == 100]
        passed = result.cutoff <= 132_000 and len(result.levels) == 2965 and at_100 == LEVELS_AT_100
        return {"enumeration": _outcome(passed, f"enumeration: {len(result.levels)} levels below {result.cutoff}, "
                                                f"{len(at_100)} with dimension 100")}

    def _coverage_step(self, state: Dict[str, Any]) -> Dict[str, Any]:
        logger.info("📊 Starting Coverage Step")
        small = self.value_agent.value_coverage("g0plus", 2, 132_000, 100)
        wide = self.value_agent.value_coverage("g0plus", 2, 132_000, 9999)
        passed = ((small.min_multiplicity, small.min_value, small.max_multiplicity, small.max_value) == (13, 86, 68, 96)
                  and wide.attained == 9566 and wide.initial_run == 4361)
        return {"coverage": _outcome(passed, f"coverage: min {small.min_multiplicity}@{small.min_value}, "
                                             f"max {small.max_multiplicity}@{small.max_value}, "
                                             f"{wide.attained} values below 10000")}

    def _missing_values_step(self, state: Dict[str, Any]) -> Dict[str, Any]:
        logger.info("🕳️ Starting Missing Values Step")
        report = self.value_agent.missing_values("g0", 2, 1000, 13_500)
        return {"missing_values": _outcome(report.missing == MISSING_GENUS_VALUES,
                                           f"missing values: {len(report.missing)} below 1000")}

    def _averages_step(self, state: Dict[str, Any]) -> Dict[str, Any]:
        logger.info("📈 Starting Averages Step")
        quick = state.get("quick", False)
        limit = 10_000 if quick else 100_000
        ratios = {target: self.average_agent.average_ratio(target, 2, limit).ratio
                  for target in ("g0", "g0star", "g0plus", "g1", "g1star", "g1plus")}
        tolerance = 0.05 if quick else 0.01
        passed = all(abs(r - 1) < tolerance for r in ratios.values())
        if not quick:
            for target in ("rho0", "rho1"):
                ratios[target] = self.average_agent.average_ratio(target, 2, 1_000_000).ratio
            passed = passed and all(abs(ratios[t] - 1) < 0.03 for t in ("rho0", "rho1"))
        summary = ", ".join(f"{t}={r:.4f}" for t, r in ratios.items())
        return {"averages": _outcome(passed, f"averages: {summary}")}

    def _rho_floor_step(self, state: Dict[str, Any]) -> Dict[str, Any]:
        logger.info("📉 Starting Rho Floor Step")
        hi = 10_000 if state.get("quick", False) else 100_000
        report = self.average_agent.rho_floor_scan(2, 1000, hi)
        return {"rho_floor": _outcome(report.minimum_decimal > 0.2,
                                      f"rho floor: min {report.minimum_decimal:.6f} at N={report.argmin}, "
                                      f"asymptote {report.asymptote:.6f}")}

    def run(self, quick: bool = False) -> Dict[str, Any]:
        """
        Run every reproduction step.

        Args:
            quick: Use reduced ranges where a step allows it

        Returns:
            Final state with one StepOutcome per step
        """
        logger.info(f"🚀 Starting reproduction workflow (quick={quick})")
        try:
            result = self.graph.invoke({"quick": quick})
            logger.info("🏁 Workflow execution completed")
            return result
        except Exception as e:
            logger.error(f"Error in workflow execution: {str(e)}")
            raise
