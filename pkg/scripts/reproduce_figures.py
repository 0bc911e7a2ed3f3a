import logging
import math
import os

from fire import Fire
from tqdm import tqdm

from nearfield_boundary.config import (
    FrequencyConfig,
    Method,
    RotationAngles,
    Scenario,
    ScenarioConfig,
    SweepKind,
    SweepSpec,
)
from nearfield_boundary.constants import ap_preset_map, ue_preset_map
from nearfield_boundary.util.sweep import default_axes, run_sweep

PRESET_PAIRS = [("cellular", "tablet"), ("cellular", "smartphone"), ("wifi", "tablet")]


def reproduce_figures(
    out_dir: str = "figures",
    freq: float = 300e9,
    workers: int = 1,
    simulate_heatmap: bool = False,
):
    """
    Writes the data behind every figure as CSV files into out_dir.

    Args:
        out_dir (str, optional): Output directory. Defaults to "figures".
        freq (float, optional): Carrier frequency in Hz. Defaults to 300e9.
        workers (int, optional): Grid points evaluated concurrently. Defaults to 1.
        simulate_heatmap (bool, optional): Also simulate every heatmap cell. Defaults to False.
    """
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    os.makedirs(out_dir, exist_ok=True)
    frequency = FrequencyConfig.from_frequency(freq)

    def scenario(kind, d1=0.1, d2=0.05, theta=0.0):
        return ScenarioConfig.from_apertures(kind, d1, d2, frequency, RotationAngles(theta))

    specs = {}
    for kind in Scenario:
        for theta, label in ((0.0, "aligned"), (math.pi / 2, "perpendicular")):
            specs[f"spread_vs_d_{kind.value}_{label}.csv"] = SweepSpec(
                SweepKind.SPREAD_VS_D,
                scenario(kind, theta=theta),
                default_axes(SweepKind.SPREAD_VS_D),
            )
            specs[f"df_vs_d2_{kind.value}_{label}.csv"] = SweepSpec(
                SweepKind.DF_VS_D2,
                scenario(kind, theta=theta),
                default_axes(SweepKind.DF_VS_D2),
            )
    for ap, ue in PRESET_PAIRS:
        specs[f"df_vs_theta_{ap}_{ue}.csv"] = SweepSpec(
            SweepKind.DF_VS_THETA,
            scenario(Scenario.UPA_UPA, ap_preset_map[ap], ue_preset_map[ue]),
            default_axes(SweepKind.DF_VS_THETA),
        )
    heatmap_methods = set(Method) - {Method.EXACT} if simulate_heatmap else {Method.APPROX}
    specs["heatmap_theta_phi.csv"] = SweepSpec(
        SweepKind.HEATMAP_THETA_PHI,
        scenario(Scenario.UPA_UPA),
        default_axes(SweepKind.HEATMAP_THETA_PHI),
        methods=heatmap_methods,
    )

    for name, spec in tqdm(specs.items(), desc="Figures"):
        spec.output_path = os.path.join(out_dir, name)
        run_sweep(spec, workers)


if __name__ == "__main__":
    Fire(reproduce_figures)
