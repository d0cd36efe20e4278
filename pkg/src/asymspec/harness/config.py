"""Experiment configuration: dataclass, INI-style file parser and figure presets."""

from __future__ import annotations

import ast
import configparser
import math
import operator
from dataclasses import dataclass, field, replace

from ..errors import ConfigError
from ..estimators import ESTIMATOR_TAGS
from ..noise import KINDS as NOISE_KINDS

TRUTH_KINDS = ("symmetric", "asymmetric", "covariance")
SWEEP_VARIABLES = ("n", "sigma", "p")
DEFAULT_N_GRID = (200, 500, 1000, 2000)
DEFAULT_TRIALS = 100
DEFAULT_SEED = 2019

# estimators that make sense for each (truth kind, noise family)
_ALLOWED = {
    ("symmetric", "asymmetric-noise"): {"eig", "svd", "sym-corrected"},
    ("symmetric", "symmetric-gaussian"): {"eig", "svd", "sym-corrected", "asym-gaussian-eig",
                                          "aggregated-eig"},
    ("symmetric", "symmetric-completion"): {"eig", "svd", "asym-completion-eig"},
    ("asymmetric", "asymmetric-noise"): {"dilation-eig", "svd"},
    ("covariance", None): {"cov-asym", "cov-sample"},
}

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_FUNCS = {"log": math.log, "sqrt": math.sqrt, "exp": math.exp}


def eval_expression(expr: str, n: float) -> float:
    """Evaluate an arithmetic expression in ``n`` (e.g. ``1/sqrt(n*log(n))``)."""
    try:
        tree = ast.parse(str(expr).strip(), mode="eval")
    except SyntaxError as exc:
        raise ConfigError(f"cannot parse expression {expr!r}: {exc.msg}") from None

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name):
            if node.id == "n":
                return float(n)
            if node.id == "pi":
                return math.pi
            raise ConfigError(f"unknown name {node.id!r} in {expr!r}")
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            val = ev(node.operand)
            return -val if isinstance(node.op, ast.USub) else val
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
                and node.func.id in _FUNCS and len(node.args) == 1 and not node.keywords):
            return _FUNCS[node.func.id](ev(node.args[0]))
        raise ConfigError(f"unsupported syntax in expression {expr!r}")

    try:
        return float(ev(tree))
    except (ValueError, ZeroDivisionError, OverflowError) as exc:
        raise ConfigError(f"expression {expr!r} failed at n={n}: {exc}") from None


@dataclass(frozen=True)
class ExperimentConfig:
    """One Monte Carlo sweep.

    Exactly one of ``n``, ``sigma`` and ``p`` varies, over ``sweep_values``.
    ``sigma`` and ``p`` are expressions in ``n`` so that n-sweeps can scale
    them (``1/sqrt(n*log(n))``, ``3*log(n)/n``). ``aspect`` sets ``n2`` for
    rectangular truths and the dimension ``d`` for covariance experiments.
    """

    experiment_id: str
    truth_kind: str = "symmetric"
    eigenvalues: tuple = (1.0,)
    style: str = "random"
    mu_target: float | None = None
    aspect: float = 1.0
    noise_kind: str = "iid-gaussian"
    sigma: str = "0"
    p: str = "1"
    sweep_variable: str = "n"
    sweep_values: tuple = DEFAULT_N_GRID
    n: int = 1000
    estimators: tuple = ("eig", "svd")
    trials: int = DEFAULT_TRIALS
    master_seed: int = DEFAULT_SEED
    direction: str = "random"
    fixed_truth: bool = False
    K: int = 10
    tol: float = 1e-10
    plot_metrics: tuple = field(default=("lambda_err",), compare=False)

    def __post_init__(self):
        validate(self)

    def with_overrides(self, **kw) -> "ExperimentConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw)

    def point(self, value: float) -> tuple[int, float, float]:
        """``(n, sigma, p)`` at one sweep value."""
        if self.sweep_variable == "n":
            n = int(round(value))
            return n, eval_expression(self.sigma, n), eval_expression(self.p, n)
        n = self.n
        if self.sweep_variable == "sigma":
            return n, float(value), eval_expression(self.p, n)
        return n, eval_expression(self.sigma, n), float(value)

    def secondary_dim(self, n: int) -> int:
        return max(2, int(round(self.aspect * n)))


def _noise_family(noise_kind: str) -> str:
    if noise_kind in ("symmetric-gaussian", "symmetric-completion"):
        return noise_kind
    return "asymmetric-noise"


def validate(cfg: ExperimentConfig) -> None:
    if not cfg.experiment_id or "," in cfg.experiment_id:
        raise ConfigError("experiment_id must be a non-empty string without commas")
    if cfg.truth_kind not in TRUTH_KINDS:
        raise ConfigError(f"truth kind must be one of {TRUTH_KINDS}, got {cfg.truth_kind!r}")
    if cfg.noise_kind not in NOISE_KINDS:
        raise ConfigError(f"noise kind must be one of {NOISE_KINDS}, got {cfg.noise_kind!r}")
    if cfg.sweep_variable not in SWEEP_VARIABLES:
        raise ConfigError(f"sweep variable must be one of {SWEEP_VARIABLES}")
    if not cfg.sweep_values:
        raise ConfigError("sweep needs at least one value")
    if cfg.trials < 1:
        raise ConfigError("trials must be >= 1")
    if cfg.K < 1:
        raise ConfigError("K must be >= 1")
    if not cfg.estimators:
        raise ConfigError("at least one estimator is required")
    for tag in cfg.estimators:
        if tag not in ESTIMATOR_TAGS:
            raise ConfigError(f"unknown estimator {tag!r}")
    if len(set(cfg.estimators)) != len(cfg.estimators):
        raise ConfigError("duplicate estimators")
    family = None if cfg.truth_kind == "covariance" else _noise_family(cfg.noise_kind)
    allowed = _ALLOWED.get((cfg.truth_kind, family))
    if allowed is None:
        raise ConfigError(f"noise {cfg.noise_kind!r} is not supported with a {cfg.truth_kind} truth")
    bad = [t for t in cfg.estimators if t not in allowed]
    if bad:
        raise ConfigError(f"estimators {bad} do not apply to {cfg.truth_kind} truth "
                          f"with {cfg.noise_kind} noise")
    if cfg.truth_kind == "asymmetric" and len(cfg.eigenvalues) != 1:
        raise ConfigError("asymmetric truths are rank 1")
    if any(float(x) == 0 for x in cfg.eigenvalues):
        raise ConfigError("eigenvalues must be nonzero")
    if cfg.direction not in ("random", "u-aligned") and not cfg.direction.startswith("basis:"):
        raise ConfigError(f"direction must be random, u-aligned or basis:<k>, got {cfg.direction!r}")
    # make sure every sweep point evaluates to a usable parameter set
    for value in cfg.sweep_values:
        n, sigma, p = cfg.point(value)
        if n < 2:
            raise ConfigError(f"n must be >= 2, got {n}")
        if sigma < 0 or not math.isfinite(sigma):
            raise ConfigError(f"sigma must be finite and >= 0, got {sigma}")
        if cfg.noise_kind in ("completion-mask", "symmetric-completion") and not 0 < p <= 1:
            raise ConfigError(f"p must lie in (0, 1], got {p} at n={n}")
        if cfg.truth_kind == "covariance" and n % 2:
            raise ConfigError("covariance experiments need an even sample count")
        if cfg.direction.startswith("basis:"):
            try:
                k = int(cfg.direction.split(":", 1)[1])
            except ValueError:
                raise ConfigError(f"bad basis index in {cfg.direction!r}") from None
            if not 0 <= k < n:
                raise ConfigError(f"basis index {k} out of range for n={n}")


# --------------------------------------------------------------------------
# file format
# --------------------------------------------------------------------------

def _split_list(text: str) -> list[str]:
    return [t.strip() for t in text.replace(";", ",").split(",") if t.strip()]


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


_FIELDS = {
    # section, key -> (field name, converter)
    ("experiment", "id"): ("experiment_id", str),
    ("experiment", "trials"): ("trials", int),
    ("experiment", "seed"): ("master_seed", int),
    ("experiment", "estimators"): ("estimators", lambda s: tuple(_split_list(s))),
    ("experiment", "direction"): ("direction", str),
    ("experiment", "fixed_truth"): ("fixed_truth", _bool),
    ("experiment", "k"): ("K", int),
    ("experiment", "tol"): ("tol", float),
    ("experiment", "plot_metrics"): ("plot_metrics", lambda s: tuple(_split_list(s))),
    ("truth", "kind"): ("truth_kind", str),
    ("truth", "eigenvalues"): ("eigenvalues", lambda s: tuple(float(x) for x in _split_list(s))),
    ("truth", "style"): ("style", str),
    ("truth", "mu"): ("mu_target", float),
    ("truth", "aspect"): ("aspect", float),
    ("noise", "kind"): ("noise_kind", str),
    ("noise", "sigma"): ("sigma", str),
    ("noise", "p"): ("p", str),
    ("sweep", "variable"): ("sweep_variable", str),
    ("sweep", "values"): ("sweep_values", lambda s: tuple(float(x) for x in _split_list(s))),
    ("sweep", "n"): ("n", int),
}


def parse_config(text: str) -> ExperimentConfig:
    """Parse the ``[experiment] / [truth] / [noise] / [sweep]`` key = value format."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    kwargs = {}
    for section in parser.sections():
        for key, raw in parser.items(section):
            spec = _FIELDS.get((section.lower(), key.lower()))
            if spec is None:
                raise ConfigError(f"unknown key [{section}] {key}")
            name, conv = spec
            try:
                kwargs[name] = conv(raw)
            except (ValueError, TypeError) as exc:
                raise ConfigError(f"bad value for [{section}] {key}: {raw!r} ({exc})") from None
    if "experiment_id" not in kwargs:
        raise ConfigError("[experiment] id is required")
    if kwargs.get("sweep_variable", "n") == "n" and "sweep_values" in kwargs:
        kwargs["sweep_values"] = tuple(int(v) for v in kwargs["sweep_values"])
    return ExperimentConfig(**kwargs)


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None


def dump_config(cfg: ExperimentConfig) -> str:
    """Inverse of :func:`parse_config`."""
    def fmt_list(xs):
        return ", ".join(repr(x) if isinstance(x, float) else str(x) for x in xs)

    lines = ["[experiment]", f"id = {cfg.experiment_id}", f"trials = {cfg.trials}",
             f"seed = {cfg.master_seed}", f"estimators = {', '.join(cfg.estimators)}",
             f"direction = {cfg.direction}", f"fixed_truth = {str(cfg.fixed_truth).lower()}",
             f"k = {cfg.K}", f"tol = {cfg.tol!r}", f"plot_metrics = {', '.join(cfg.plot_metrics)}",
             "", "[truth]", f"kind = {cfg.truth_kind}",
             f"eigenvalues = {fmt_list(float(x) for x in cfg.eigenvalues)}",
             f"style = {cfg.style}", f"aspect = {cfg.aspect!r}"]
    if cfg.mu_target is not None:
        lines.append(f"mu = {cfg.mu_target!r}")
    lines += ["", "[noise]", f"kind = {cfg.noise_kind}", f"sigma = {cfg.sigma}", f"p = {cfg.p}",
              "", "[sweep]", f"variable = {cfg.sweep_variable}",
              f"values = {fmt_list(cfg.sweep_values)}", f"n = {cfg.n}", ""]
    return "\n".join(lines)


# --------------------------------------------------------------------------
# figure presets
# --------------------------------------------------------------------------

SIGMA_SCALED = "1/sqrt(n*log(n))"
P_SCALED = "3*log(n)/n"
FIGURES = ("fig1a", "fig1b", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7")


def preset(figure: str) -> ExperimentConfig:
    """Configuration reproducing one of the reference figures at desk scale."""
    if figure == "fig1a":
        return ExperimentConfig("fig1a", noise_kind="iid-gaussian", sigma=SIGMA_SCALED,
                                estimators=("eig", "svd"),
                                plot_metrics=("lambda_err", "linf_err", "l2_err"))
    if figure == "fig1b":
        return ExperimentConfig("fig1b", noise_kind="completion-mask", p=P_SCALED,
                                estimators=("eig", "svd"),
                                plot_metrics=("lambda_err", "linf_err", "l2_err"))
    if figure == "fig2":
        return ExperimentConfig("fig2", noise_kind="iid-gaussian", sweep_variable="sigma",
                                sweep_values=(0.001, 0.002, 0.004, 0.008, 0.016), n=1000,
                                estimators=("eig", "svd", "sym-corrected"))
    if figure == "fig3":
        return ExperimentConfig("fig3", noise_kind="completion-mask", sweep_variable="p",
                                sweep_values=(0.02, 0.05, 0.1, 0.2, 0.5), n=1000,
                                estimators=("eig", "svd"))
    if figure == "fig4":
        return ExperimentConfig("fig4", truth_kind="asymmetric", aspect=0.5,
                                noise_kind="completion-mask", p=P_SCALED,
                                estimators=("dilation-eig", "svd"),
                                plot_metrics=("lambda_err", "linf_err"))
    if figure == "fig5":
        return ExperimentConfig("fig5", truth_kind="covariance", aspect=0.1,
                                estimators=("cov-asym", "cov-sample"))
    if figure == "fig6":
        return ExperimentConfig("fig6", noise_kind="symmetric-gaussian", sigma=SIGMA_SCALED,
                                estimators=("asym-gaussian-eig", "eig", "svd", "aggregated-eig"),
                                plot_metrics=("lambda_err", "linf_err"))
    if figure == "fig7":
        return ExperimentConfig("fig7", noise_kind="symmetric-completion", p=P_SCALED,
                                estimators=("asym-completion-eig", "eig", "svd"),
                                plot_metrics=("lambda_err", "linf_err"))
    raise ConfigError(f"unknown figure {figure!r}; choose from {', '.join(FIGURES)}")
