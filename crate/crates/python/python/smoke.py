"""Smoke test for the compiled bindings.

Build and install first:  maturin develop -m crates/python/Cargo.toml
"""

import json
import os
import sys
import tempfile

import hplscape_py as hp


def check(cond, what):
    if not cond:
        print(f"FAIL  {what}")
        sys.exit(1)
    print(f"ok    {what}")


def main():
    nk0 = hp.Landscape.nk(10, 0, seed=1)
    check(len(nk0) == 1024 and nk0.n_adjacencies == 5120, "NK(10,0) has 1024 nodes, 5120 adjacencies")
    check(len(nk0.local_optima()) == 1, "NK(10,0) is unimodal")

    nk9 = hp.Landscape.nk(10, 9, seed=1)
    report = nk9.fla_report(seed=3)
    check(report["n_local_optima"] > 1, f"NK(10,9) has {report['n_local_optima']} local optima")
    check(-1.0 <= report["autocorrelation"] <= 1.0, "autocorrelation in range")
    check(report == nk9.fla_report(seed=3), "report is deterministic")

    lon = nk9.lon()
    check([v["id"] for v in lon["vertices"]] == nk9.local_optima(), "LON vertices are the local optima")
    optimum_of, steps = nk9.basins()
    check(all(optimum_of[o] == o for o in nk9.local_optima()), "optima sit in their own basins")
    opt, n_steps, path = nk9.local_search(0)
    check(opt == optimum_of[0] and n_steps == steps[0] and path[0] == 0, "local search agrees with basins")

    rev = nk9.with_losses([-x for x in nk9.losses()])
    check(len(rev.local_optima()) > 0, "reversed landscape rebuilds")
    copy = hp.Landscape.from_graph_json(nk9.to_graph_json())
    check(copy.edges() == nk9.edges(), "graph JSON round-trips")
    cmp = nk9.compare(rev)
    check(abs(cmp["spearman"] + 1.0) < 1e-12 and cmp["gamma_set"] == 0.0, "reversed landscape compares as -1")

    with tempfile.TemporaryDirectory() as d:
        schema = os.path.join(d, "schema.json")
        evals = os.path.join(d, "evals.csv")
        with open(schema, "w") as f:
            json.dump({"hps": [
                {"name": "lr", "kind": "numerical", "values": [0.001, 0.01, 0.1]},
                {"name": "opt", "kind": "categorical", "values": ["adam", "sgd"]},
            ]}, f)
        with open(evals, "w") as f:
            f.write("lr,opt,acc\n0.1,adam,0.9\n0.01,adam,0.95\n0.001,adam,0.85\n0.1,sgd,0.8\n0.01,sgd,0.97\n")
        l = hp.Landscape.from_files(schema, evals, loss_column="acc", direction="maximize")
        check(len(l) == 5, "partial grid from files has 5 nodes")
        check(l.local_optima() == [2], "best accuracy is the only optimum")
        try:
            hp.Landscape.from_files(schema, evals, loss_column="loss")
            check(False, "missing column raises")
        except ValueError as e:
            check("loss" in str(e), "missing column raises ValueError")

    print("smoke test passed")


if __name__ == "__main__":
    main()
