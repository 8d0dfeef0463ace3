"""Command-line front end.

Reports go to standard output, diagnostics and logs to standard error.
Exit codes: 0 when every check passed, 1 when some check failed, 2 on a
usage or configuration error.
"""

import logging
import sys

from functools import wraps
from logging import getLogger
from typing import Any, Callable, Dict, List, Optional

import click

from .cache import CacheStore
from .config import KINDS, TIERS, JobConfig
from .crystalline import (
    breuil_chain,
    crystalline_lift,
    dieudonne_chain,
    faithfulness_probe,
    kappa_ladder_step,
)
from .errors import ConfigError, WittWindowsError
from .frames import (
    Frame,
    breuil_residue_ring,
    breuil_tower,
    build_dieudonne_frame,
    check_frame_axioms,
    dieudonne_tower,
)
from .morphisms import kappa_morphism, projection_morphism
from .report import Report
from .selftest import run_selftest
from .windows import (
    Window,
    base_change,
    canonical_base_change_morphism,
    check_base_change_universal,
    check_window,
    random_window,
)


log = getLogger("witt-windows")

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

_VERBOSITY = {0: logging.WARNING, 1: logging.INFO}

_JOB_OPTIONS = [
    click.option("--config", "config_path", type=click.Path(dir_okay=False), help="key = value config file."),
    click.option("--p", "p", type=int, help="The prime."),
    click.option("--N", "N", type=int, help="p-adic precision of S (default a + budget)."),
    click.option("--e", "e", type=int, help="Degree of the default E = u^e + p."),
    click.option("--a", "a", type=int, help="Level a."),
    click.option("--r", "r", type=int, help="Number of t variables."),
    click.option("--E", "E", type=str, help="Eisenstein polynomial in u, e.g. 'u+3'."),
    click.option("--trunc", "trunc", type=str, help="Truncations of t_1..t_r, e.g. '2,inf'."),
    click.option("--budget", "budget", type=int, help="Witt length of Dieudonné frames."),
    click.option("--rank", "rank", type=str, help="d_L,d_T of the window."),
    click.option("--seed", "seed", type=int, help="Seed of the run's random generator."),
    click.option("--tier", "tier", type=click.Choice(TIERS), help="Self-test tier."),
    click.option("--samples", "samples", type=int, help="Random samples per check."),
    click.option("--kind", "kind", type=click.Choice(KINDS), help="Frame kind."),
    click.option("--n", "n", type=str, help="Truncations of the C_n frame."),
    click.option("--matrix", "matrix", type=str, help="Structural matrix, rows separated by ';'."),
    click.option("--cache-period", "cache_period", type=float, help="Seconds to keep cached reports."),
    click.option("--limit", "limit", type=int, help="Largest set to enumerate."),
]


def job_options(fn: Callable, defaults: Optional[Dict[str, Any]] = None) -> Callable:
    """Attach the configuration flags and hand the command a :class:`JobConfig`."""

    @wraps(fn)
    def wrapper(config_path: Optional[str] = None, **overrides: Any):
        try:
            cfg = JobConfig.from_sources(config_path, overrides, defaults)
        except WittWindowsError as e:
            _usage_error(e)
        return fn(cfg)

    for option in reversed(_JOB_OPTIONS):
        wrapper = option(wrapper)
    return wrapper


def _usage_error(e: Exception):
    click.echo(f"error: {type(e).__name__}: {e}", err=True)
    sys.exit(EXIT_USAGE)


def run_command(cfg: JobConfig, command: str, build: Callable[[JobConfig], Report]) -> int:
    """Build (or fetch from the cache) the report of ``command`` and print it.

    Returns the exit code.
    """
    store = CacheStore(cache_period=cfg.cache_period)
    if store.cache_enabled():
        store.clear_cache(mtime=cfg.cache_period)

    def compute():
        report = build(cfg)
        return report.render(), report.passed

    try:
        text, passed = store.fetch(f"{command}|{cfg.describe()}", compute)
    except (WittWindowsError, ValueError) as e:
        _usage_error(e)
    click.echo(text, nl=False)
    return EXIT_PASS if passed else EXIT_FAIL


def _window(cfg: JobConfig, frame: Frame) -> Window:
    """The configured window over ``frame``, random when no matrix is given."""
    if cfg.matrix is not None:
        return cfg.window(frame)
    return random_window(frame, cfg.rank[0], cfg.rank[1], cfg.rng())


def _header(report: Report, cfg: JobConfig, extra: Optional[Dict[str, Any]] = None) -> Report:
    report.header.update(cfg.header())
    report.header.update(extra or {})
    return report


def build_frame_check(cfg: JobConfig) -> Report:
    """frame-check: the frame axioms of the configured frame."""
    frame = cfg.frame()
    return _header(check_frame_axioms(frame, cfg.samples, cfg.rng()), cfg)


def build_window_validate(cfg: JobConfig) -> Report:
    """window-validate: the window identities of the configured window."""
    frame = cfg.frame()
    w = _window(cfg, frame)
    return _header(check_window(w, cfg.samples, cfg.rng()), cfg, {"A": w.A})


def build_basechange(cfg: JobConfig) -> Report:
    """basechange: push the window along κ, or down one level for Dieudonné frames."""
    frame = cfg.frame()
    w = _window(cfg, frame)
    if cfg.kind == "dieudonne":
        if cfg.a < 2:
            raise ConfigError("base change of a Dieudonné window needs a >= 2")
        base = breuil_residue_ring(cfg.p, cfg.eisenstein, cfg.a - 1, cfg.truncations)
        alpha = projection_morphism(frame, build_dieudonne_frame(base, cfg.budget), "proj")
    else:
        target = build_dieudonne_frame(frame.residue_ring, cfg.budget)
        alpha = kappa_morphism(frame, target)
    image = base_change(alpha, w)
    report = check_window(image, cfg.samples, cfg.rng())
    universal = check_base_change_universal(canonical_base_change_morphism(alpha, w), 2, cfg.rng())
    report.extend(universal, "universal")
    report.title = f"basechange {alpha.name}"
    return _header(report, cfg, {"A": w.A, "image": image.A})


def _chain(cfg: JobConfig):
    if cfg.a < 2:
        raise ConfigError("lifting needs a >= 2")
    levels = list(range(cfg.a, 0, -1))
    if cfg.kind == "breuil":
        return breuil_chain(cfg.p, cfg.eisenstein, levels, cfg.truncations, cfg.budget)
    if cfg.kind == "dieudonne":
        return dieudonne_chain(cfg.p, levels, cfg.truncations, cfg.eisenstein, cfg.budget)
    raise ConfigError("lifting is defined for breuil and dieudonne frames")


def build_lift(cfg: JobConfig) -> Report:
    """lift: lift a window over the level-1 frame to level a and reduce it back."""
    chain = _chain(cfg)
    w = _window(cfg, chain[-1].target)
    lifted = crystalline_lift(chain, w)
    report = check_window(lifted, cfg.samples, cfg.rng())
    report.title = f"lift to level {cfg.a}"

    def reduces() -> bool:
        image = lifted
        for ctx in chain:
            image = base_change(projection_morphism(ctx.frame, ctx.target), image)
        return image.A == w.A

    report.guard("lift-reduces", reduces, "the lifted window does not reduce to the input")
    return _header(report, cfg, {"A": w.A, "lifted": lifted.A})


def build_ladder(cfg: JobConfig) -> Report:
    """ladder: the κ ladder between levels a + 1 and a."""
    if cfg.kind != "breuil":
        raise ConfigError("the ladder starts from a Breuil frame")
    upper = breuil_tower(cfg.p, cfg.eisenstein, [cfg.a + 1, cfg.a], cfg.truncations, cfg.budget)[0]
    w = _window(cfg, upper)
    report = kappa_ladder_step(
        cfg.p, cfg.eisenstein, cfg.a, w, cfg.budget, cfg.truncations, cfg.samples, cfg.rng()
    )
    return _header(report, cfg, {"A": w.A})


def build_homprobe(cfg: JobConfig) -> Report:
    """homprobe: compare End(w) with End(κ_*w) by enumeration."""
    if cfg.kind != "breuil":
        raise ConfigError("the hom comparison starts from a Breuil frame")
    if cfg.N is None:
        # S = Z/p^(a + budget - 1) has the size of W_budget(R_a)
        cfg = cfg.with_overrides(N=cfg.a + cfg.budget - 1)
    frame = cfg.frame()
    target = dieudonne_tower(cfg.p, [cfg.a], cfg.truncations, cfg.eisenstein, cfg.budget)[0]
    w = cfg.window(frame)
    report = faithfulness_probe(w, w, kappa_morphism(frame, target), cfg.limit)
    return _header(report, cfg, {"A": w.A})


def build_selftest(cfg: JobConfig) -> Report:
    """selftest: the acceptance suite at the configured tier."""
    return run_selftest(cfg.seed, cfg.tier)


COMMANDS: Dict[str, Callable[[JobConfig], Report]] = {
    "frame-check": build_frame_check,
    "window-validate": build_window_validate,
    "basechange": build_basechange,
    "lift": build_lift,
    "ladder": build_ladder,
    "homprobe": build_homprobe,
    "selftest": build_selftest,
}

#: Per-command defaults, below the config file and the flags.
COMMAND_DEFAULTS: Dict[str, Dict[str, Any]] = {
    # End(w) of a rank (1, 1) window is beyond the enumeration limit
    "homprobe": {"rank": "0,1"},
}


@click.group()
@click.option("-v", "--verbose", count=True, help="-v for INFO, -vv for DEBUG logs on stderr.")
def cli(verbose: int):
    """Frames, windows and crystalline lifting over truncated Witt vectors."""
    logging.basicConfig(stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    log.setLevel(_VERBOSITY.get(verbose, logging.DEBUG))


def _register(name: str, build: Callable[[JobConfig], Report]):
    def command(cfg: JobConfig):
        sys.exit(run_command(cfg, name, build))

    command = job_options(command, COMMAND_DEFAULTS.get(name))
    command.__doc__ = build.__doc__.split(":", 1)[1].strip()
    command.__name__ = name.replace("-", "_")
    cli.command(name)(command)


for _name, _build in COMMANDS.items():
    _register(_name, _build)


def main(argv: Optional[List[str]] = None):
    """Console entry point."""
    cli.main(args=argv, prog_name="witt-windows")
