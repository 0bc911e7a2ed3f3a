"""
This module is the command line front end, built with fire.

Subcommands:
    solve: Near-field distance of one scenario by every requested method.
    spread: Maximum phase mismatch at one separation or over a range of separations.
    sweep: Figure-reproduction sweeps written as CSV.
    heatmap: Near-field distance over (theta, phi) written as CSV.
    validate: The acceptance matrix comparing simulator and closed forms.

Every subcommand takes the scenario flags of `ScenarioOptions` (`--scenario`, `--d1`, `--d2`, `--freq` or
`--wavelength`, `--theta`, `--phi`, `--degrees`, `--method`, `--mode`, `--rel-tol`, `--out`, `--preset-ap`,
`--preset-ue`), a key=value `--config` file that the flags override, `--dump-config`, `--verbose` and `--debug`.

Exit codes: 0 on success, 1 on a computation or validation failure, 2 on a usage error.

Example:
    nearfield solve --scenario upa --d1 0.1 --d2 0.05 --freq 300e9
"""

import logging
import sys
from typing import Optional

import fire
import pandas as pd

from nearfield_boundary.config import AxisRange, Method, ScenarioOptions, SweepKind, SweepSpec
from nearfield_boundary.errors import (
    InvalidArgumentError,
    NearFieldError,
    ValidationFailedError,
)
from nearfield_boundary.model.formulas import closed_form_distance, has_exact_form
from nearfield_boundary.model.simulator import max_phase_spread, solve_near_field_distance
from nearfield_boundary.output import NearFieldResult
from nearfield_boundary.util.evaluate import REFERENCE_WAVELENGTH_M, run_validation
from nearfield_boundary.util.helpers import pairwise_relative_differences
from nearfield_boundary.util.sweep import default_axes, run_sweep, write_csv

logger = logging.getLogger(__name__)


def _configure_logging(verbose: bool, debug: bool):
    level = logging.DEBUG if debug else logging.INFO if verbose else logging.WARNING
    logging.basicConfig(
        level=level, format="%(levelname)s %(name)s: %(message)s", force=True
    )


def _axis(
    default: AxisRange,
    start: Optional[float],
    stop: Optional[float],
    count: Optional[int],
) -> AxisRange:
    return AxisRange(
        default.start if start is None else float(start),
        default.stop if stop is None else float(stop),
        default.count if count is None else int(count),
    )


class NearFieldCli:
    """
    Near-field boundary of misaligned antenna arrays.
    """

    def _options(
        self,
        config: Optional[str],
        verbose: bool,
        debug: bool,
        dump_config: bool,
        flags: dict,
    ) -> Optional[ScenarioOptions]:
        _configure_logging(verbose, debug)
        options = ScenarioOptions.from_sources(config, **flags)
        if dump_config:
            sys.stdout.write(options.dump())
            return None
        return options

    def solve(
        self,
        config: Optional[str] = None,
        verbose: bool = False,
        debug: bool = False,
        dump_config: bool = False,
        workers: Optional[int] = None,
        **flags,
    ):
        """
        Prints the near-field distance by every requested method and their relative differences.
        """
        options = self._options(config, verbose, debug, dump_config, flags)
        if options is None:
            return
        scenario = options.to_scenario()
        results = []
        for method in options.methods():
            if method is Method.SIMULATED:
                results.append(
                    solve_near_field_distance(
                        scenario, options.rel_tol, options.search_mode(), workers
                    )
                )
            elif options.method == "all" and not has_exact_form(scenario) and (
                method is Method.EXACT
            ):
                logger.warning("No exact closed form for this rotation, skipping it")
            else:
                results.append(
                    NearFieldResult(closed_form_distance(scenario, method), method)
                )
        frame = pd.DataFrame([result.as_row() for result in results])
        print(frame.to_string(index=False))
        differences = pairwise_relative_differences(
            {result.method: result.d_f_m for result in results}
        )
        for pair, difference in differences.items():
            print(f"{pair}: {difference:.3e}")
        if options.out is not None:
            write_csv(frame, options.out)

    def spread(
        self,
        d: Optional[float] = None,
        start: Optional[float] = None,
        stop: Optional[float] = None,
        count: Optional[int] = None,
        config: Optional[str] = None,
        verbose: bool = False,
        debug: bool = False,
        dump_config: bool = False,
        workers: Optional[int] = None,
        **flags,
    ):
        """
        Prints the maximum phase mismatch at separation --d, or over --start/--stop/--count separations.
        """
        options = self._options(config, verbose, debug, dump_config, flags)
        if options is None:
            return
        scenario = options.to_scenario()
        if d is not None:
            separations = [float(d)]
        else:
            separations = _axis(
                default_axes(SweepKind.SPREAD_VS_D)["d"], start, stop, count
            ).values()
        rows = []
        for separation in separations:
            result = max_phase_spread(
                scenario, float(separation), options.search_mode(), workers
            )
            rows.append(
                {
                    "d_m": result.separation_m,
                    "spread_m": result.spread_m,
                    "phase_spread_rad": result.phase_spread_rad,
                    "argmax_ap": result.argmax_pair[0],
                    "argmax_ue": result.argmax_pair[1],
                    "argmin_ap": result.argmin_pair[0],
                    "argmin_ue": result.argmin_pair[1],
                }
            )
        frame = pd.DataFrame(rows)
        print(frame.to_string(index=False))
        if options.out is not None:
            write_csv(frame, options.out)

    def sweep(
        self,
        kind: str = SweepKind.DF_VS_THETA.value,
        start: Optional[float] = None,
        stop: Optional[float] = None,
        count: Optional[int] = None,
        config: Optional[str] = None,
        verbose: bool = False,
        debug: bool = False,
        dump_config: bool = False,
        workers: Optional[int] = None,
        **flags,
    ):
        """
        Writes a sweep (--kind spread-vs-d, df-vs-d2, df-vs-theta or heatmap) to --out, or prints it.
        """
        options = self._options(config, verbose, debug, dump_config, flags)
        if options is None:
            return
        try:
            kind = SweepKind(str(kind))
        except ValueError:
            raise InvalidArgumentError(f"Unknown sweep kind {kind!r}") from None
        axes = default_axes(kind)
        if len(axes) == 1:
            (name, default), = axes.items()
            axes = {name: _axis(default, start, stop, count)}
        elif count is not None:
            axes = {name: _axis(axis, None, None, count) for name, axis in axes.items()}
        self._run(kind, axes, options, workers)

    def heatmap(
        self,
        count: Optional[int] = None,
        config: Optional[str] = None,
        verbose: bool = False,
        debug: bool = False,
        dump_config: bool = False,
        workers: Optional[int] = None,
        **flags,
    ):
        """
        Writes (theta, phi, d_F) triples on a --count x --count grid to --out, or prints them.
        """
        self.sweep(
            SweepKind.HEATMAP_THETA_PHI.value,
            count=count,
            config=config,
            verbose=verbose,
            debug=debug,
            dump_config=dump_config,
            workers=workers,
            **flags,
        )

    def _run(self, kind, axes, options: ScenarioOptions, workers: Optional[int]):
        spec = SweepSpec(
            sweep_kind=kind,
            scenario=options.to_scenario(),
            axes=axes,
            output_path=options.out,
            methods=frozenset(options.methods()),
            mode=options.search_mode(),
            rel_tol=options.rel_tol,
        )
        frame = run_sweep(spec, workers)
        if spec.output_path is None:
            print(frame.to_string(index=False))

    def validate(
        self,
        perturb: float = 0.0,
        seed: int = 0,
        config: Optional[str] = None,
        verbose: bool = False,
        debug: bool = False,
        dump_config: bool = False,
        workers: Optional[int] = None,
        **flags,
    ):
        """
        Runs the acceptance matrix and prints a pass/fail table. Fails (exit 1) if any row fails.

        The aligned, reduction and identity rows use the configured apertures and frequency. Without
        --freq or --wavelength they run at a wavelength of exactly 1 mm.
        """
        options = self._options(config, verbose, debug, dump_config, flags)
        if options is None:
            return
        wavelength_m = (
            REFERENCE_WAVELENGTH_M
            if options.freq is None and options.wavelength is None
            else options.frequency_config().wavelength_m
        )
        report = run_validation(
            perturb=float(perturb),
            workers=workers,
            seed=int(seed),
            d1_m=float(options.d1),
            d2_m=float(options.d2),
            wavelength_m=wavelength_m,
        )
        frame = report.to_frame()
        print(frame.to_string(index=False))
        if options.out is not None:
            write_csv(frame, options.out)
        if not report.passed:
            failed = sum(not row.passed for row in report.rows)
            raise ValidationFailedError(f"{failed} of {len(report.rows)} checks failed")
        print("All checks passed")


def main(argv: Optional[list[str]] = None) -> int:
    """
    Runs the command line and maps errors to exit codes.

    Args:
        argv (Optional[list[str]], optional): Arguments without the program name. Defaults to sys.argv[1:].

    Returns:
        int: 0 on success, 1 on a computation or validation failure, 2 on a usage error.
    """
    try:
        fire.Fire(NearFieldCli, command=argv, name="nearfield")
    except fire.core.FireExit as exit_:
        return int(exit_.code or 0)
    except InvalidArgumentError as error:
        print(f"error: {error}", file=sys.stderr)
        return 2
    except (NearFieldError, OSError) as error:
        print(f"error: {error}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
