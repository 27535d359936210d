"""Regenerates the bundled synthetic fixtures (deterministic)."""
import random
from pathlib import Path

HERE = Path(__file__).parent
rng = random.Random(20240917)

datasets = [f"ds_{i:02d}" for i in range(1, 13)]
algorithms = ["BPR", "EASE", "ItemKNN", "LightGCN", "MultVAE", "Pop"]
hardness = {d: 0.1 + 0.8 * i / 11 for i, d in enumerate(datasets)}
strength = {"BPR": 0.55, "EASE": 0.75, "ItemKNN": 0.6, "LightGCN": 0.7, "MultVAE": 0.65, "Pop": 0.3}
niche = {(d, a): rng.uniform(-0.08, 0.08) for d in datasets for a in algorithms}
metric_scale = {"nDCG": 0.6, "Recall": 0.7, "HitRate": 1.0}
k_scale = {5: 0.85, 10: 1.0}

rows = ["dataset,algorithm,metric,k,fold,value"]
for d in datasets:
    for a in algorithms:
        for metric, ms in metric_scale.items():
            for k, ks in k_scale.items():
                base = strength[a] * (1.0 - hardness[d]) + niche[(d, a)]
                for fold in range(1, 6):
                    v = base * ms * ks + rng.gauss(0.0, 0.01)
                    v = min(max(v, 0.0), 1.0)
                    rows.append(f"{d},{a},{metric},{k},{fold},{v:.6f}")
(HERE / "results_fixture.csv").write_text("\n".join(rows) + "\n")

line = ["dataset,algorithm,metric,k,fold,value"]
for i, d in enumerate(["line_a", "line_b", "line_c", "line_d", "line_e"]):
    for a in ["AlgoX", "AlgoY"]:
        line.append(f"{d},{a},nDCG,10,1,{0.1 + 0.2 * i:.1f}")
(HERE / "collinear_results.csv").write_text("\n".join(line) + "\n")


def interactions(n_users, n_items, per_user, skew, rated, delim, dup_rate):
    header = ["user", "item"] + (["rating"] if rated else [])
    out = [delim.join(header)]
    for u in range(n_users):
        n = max(1, int(rng.gauss(per_user, per_user / 3)))
        items = set()
        while len(items) < min(n, n_items):
            items.add(min(int(rng.paretovariate(skew)) - 1, n_items - 1))
        for it in sorted(items):
            fields = [f"u{u}", f"i{it}"]
            if rated:
                fields.append(str(rng.randint(1, 5)))
            out.append(delim.join(fields))
            if rng.random() < dup_rate:
                out.append(delim.join(fields))
    return "\n".join(out) + "\n"


(HERE / "ds_01.csv").write_text(interactions(300, 150, 20, 1.2, True, ",", 0.0))
(HERE / "ds_02.tsv").write_text(interactions(250, 200, 12, 1.5, False, "\t", 0.0))
(HERE / "ds_03.tsv").write_text(interactions(200, 120, 8, 1.1, True, "\t", 0.05))
