# Copyright 2026 The mfmsbm Authors
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""End-to-end checks of the mfmsbm command line: outputs, schemas, exit codes."""

import argparse
import csv
import filecmp
import json
import os
import pathlib
import subprocess
import sys
import tempfile
import unittest

import jsonschema

ARGS = None


def run(*argv, env=None):
    return subprocess.run([ARGS.binary, *map(str, argv)], capture_output=True, text=True, env=env)


def validate(path, kind):
    schema = json.loads((pathlib.Path(ARGS.schemas) / f"{kind}.schema.json").read_text())
    doc = json.loads(pathlib.Path(path).read_text())
    jsonschema.validate(doc, schema)
    return doc


def csv_header(path):
    with open(path, newline="") as f:
        return next(csv.reader(f))


class CliTest(unittest.TestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.dir = pathlib.Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def ok(self, *argv, env=None):
        r = run(*argv, env=env)
        self.assertEqual(r.returncode, 0, r.stderr)
        return r

    def test_generate_manifest_and_determinism(self):
        a, b = self.dir / "a", self.dir / "b"
        for out in (a, b):
            self.ok("--seed", 7, "generate", "--n", 40, "--k", 3, "--unbalanced", "--replicates", 2, "--out", out)
        doc = validate(a / "manifest.json", "manifest")
        self.assertEqual(doc["spec"]["sizes"], [8, 13, 19])
        self.assertEqual(doc["files"][1]["seed"], 7 * 10**6 + 1)
        for f in ("rep_001.edges", "rep_002.labels", "manifest.json"):
            self.assertTrue(filecmp.cmp(a / f, b / f, shallow=False), f)
        labels = (a / "rep_001.labels").read_text().split()
        self.assertEqual(len(labels), 40)

    def test_generate_sizes(self):
        self.ok("generate", "--n", 100, "--k", 3, "--replicates", 1, "--out", self.dir)
        self.assertEqual(validate(self.dir / "manifest.json", "manifest")["spec"]["sizes"], [33, 33, 34])
        self.ok("generate", "--n", 100, "--k", 3, "--unbalanced", "--replicates", 1, "--degree-corrected",
                "--out", self.dir)
        doc = validate(self.dir / "manifest.json", "manifest")
        self.assertEqual(doc["spec"]["sizes"], [22, 33, 45])
        self.assertEqual(sum(w == 0.8 for w in doc["files"][0]["weights"]), 30)

    def test_fit_outputs(self):
        self.ok("generate", "--n", 60, "--k", 2, "--replicates", 1, "--out", self.dir)
        out = self.dir / "fit"
        self.ok("--iters", 60, "--burnin", 20, "--chains", 3, "fit", self.dir / "rep_001.edges", "--trace",
                "--out", out)
        doc = validate(out / "fit.json", "fit")
        self.assertEqual(len(doc["z_hat"]), 60)
        self.assertEqual(len(doc["per_chain_modes"]), 3)
        self.assertEqual(sum(doc["t_histogram"].values()), 3 * 40)
        header = csv_header(out / "cocluster.csv")
        self.assertEqual(header[0], "node")
        self.assertEqual(len(header), 61)
        lines = (out / "trace_2.tsv").read_text().splitlines()
        self.assertEqual(lines[0], "iter\tt\tz_rle\tloglik")
        self.assertEqual(len(lines), 61)
        it, t, rle, ll = lines[-1].split("\t")
        self.assertEqual(sum(int(r.split("x")[1]) for r in rle.split(",")), 60)
        self.assertEqual(len({r.split("x")[0] for r in rle.split(",")}), int(t))
        float(ll)

    def test_fit_two_nodes_and_config_file(self):
        g = self.dir / "two.edges"
        g.write_text("1 2\n")
        cfg = self.dir / "run.toml"
        cfg.write_text("iters = 10\nburnin = 4\nchains = 2\n")
        self.ok("--config", cfg, "fit", g, "--out", self.dir)
        doc = validate(self.dir / "fit.json", "fit")
        self.assertEqual(doc["config"]["iterations"], 10)
        self.assertEqual(doc["chains"], 2)
        self.ok("--config", cfg, "--iters", 12, "fit", g, "--out", self.dir)
        self.assertEqual(validate(self.dir / "fit.json", "fit")["config"]["iterations"], 12)

    def test_fit_csv_adjacency(self):
        g = self.dir / "g.csv"
        g.write_text("0,1,0\n1,0,1\n0,1,0\n")
        self.ok("--iters", 20, "--burnin", 5, "--chains", 1, "fit", g, "--out", self.dir)
        self.assertEqual(len(validate(self.dir / "fit.json", "fit")["z_hat"]), 3)

    def test_replicate_deterministic_across_threads(self):
        common = ["--seed", 3, "--iters", 40, "--burnin", 20, "--chains", 2, "--init-clusters", 4]
        design = ["--n", 30, "--k", 2, "--replicates", 3]
        env1 = dict(os.environ, MFM_SBM_THREADS="1")
        env3 = dict(os.environ, MFM_SBM_THREADS="3")
        self.ok(*common, "--out", self.dir / "a", "replicate", *design, env=env1)
        self.ok(*common, "--out", self.dir / "b", "replicate", *design, env=env3)
        doc = validate(self.dir / "a" / "replicate.json", "replicate")
        self.assertEqual(len(doc["replicates"]), 3)
        self.assertTrue(filecmp.cmp(self.dir / "a" / "replicate.json", self.dir / "b" / "replicate.json",
                                    shallow=False))

    def test_oracle(self):
        r = self.ok("--iters", 40000, "--burnin", 1000, "oracle", "--n", 3, "--shape", "empty", "--out", self.dir)
        doc = validate(self.dir / "oracle.json", "oracle")
        self.assertEqual(len(doc["partitions"]), 5)
        self.assertLess(doc["total_variation"], 0.02)
        self.assertIn("TV", r.stdout)
        self.assertEqual(run("oracle", "--n", 9, "--out", self.dir).returncode, 2)
        bad = run("--iters", 0, "--burnin", 0, "oracle", "--n", 4, "--out", self.dir)
        self.assertEqual(bad.returncode, 2)
        self.assertIn("iteration", bad.stderr)

    def test_convergence(self):
        self.ok("--iters", 1, "convergence", "--n", 20, "--k", 2, "--starts", 1, "--out", self.dir)
        rows = (self.dir / "convergence.csv").read_text().splitlines()
        self.assertEqual(rows[0], "start,iteration,rand_index")
        self.assertEqual(len(rows), 2)
        self.ok("generate", "--n", 30, "--k", 2, "--replicates", 1, "--out", self.dir)
        self.ok("--iters", 5, "convergence", "--graph", self.dir / "rep_001.edges", "--truth",
                self.dir / "rep_001.labels", "--starts", 2, "--out", self.dir)
        self.assertEqual(len((self.dir / "convergence.csv").read_text().splitlines()), 11)

    def test_gap_and_vtable(self):
        self.ok("gap", "--n", 8, "--k", 2, "--draws", 2, "--out", self.dir)
        validate(self.dir / "gap.json", "gap")
        self.assertEqual(csv_header(self.dir / "gap.csv"), ["r", "min_gap", "count"])
        self.ok("--gamma", 0.5, "vtable", "--n", 30, "--t-max", 10, "--out", self.dir)
        doc = validate(self.dir / "vtable.json", "vtable")
        self.assertEqual(len(doc["log_v"]), 10)
        self.ok("--pmf", "point-mass:2", "vtable", "--n", 5, "--out", self.dir)
        doc = validate(self.dir / "vtable.json", "vtable")
        self.assertIsNone(doc["log_v"][2])
        cache = self.dir / "cache.json"
        self.ok("--vcache", cache, "vtable", "--n", 20, "--out", self.dir)
        validate(cache, "vtable")

    def test_exit_codes(self):
        self.assertEqual(run().returncode, 2)
        self.assertEqual(run("frobnicate").returncode, 2)
        self.assertEqual(run("fit", self.dir / "missing.edges").returncode, 2)
        g = self.dir / "loop.edges"
        g.write_text("1 2\n3 3\n")
        r = run("fit", g, "--out", self.dir)
        self.assertEqual(r.returncode, 2)
        self.assertIn(":2:", r.stderr)
        g.write_text("1 2\n2 3\n")
        self.assertEqual(run("--prior", "dp", "fit", g).returncode, 2)
        self.assertEqual(run("--iters", 10, "--burnin", 20, "fit", g).returncode, 2)
        self.assertEqual(run("generate", "--replicates", 0, "--out", self.dir).returncode, 2)
        self.assertEqual(run("--iters", "abc", "fit", g).returncode, 2)
        self.assertEqual(run("--help").returncode, 0)
        blocker = self.dir / "file"
        blocker.write_text("")
        r = run("--iters", 10, "--burnin", 5, "--chains", 1, "fit", g, "--out", blocker / "sub")
        self.assertEqual(r.returncode, 3, r.stderr)

    def test_crp_prior(self):
        g = self.dir / "g.edges"
        g.write_text("1 2\n2 3\n4 5\n")
        self.ok("--prior", "crp:0.5", "--iters", 20, "--burnin", 5, "fit", g, "--out", self.dir)
        self.assertEqual(validate(self.dir / "fit.json", "fit")["config"]["prior"], "crp:0.5")


if __name__ == "__main__":
    parser = argparse.ArgumentParser()
    parser.add_argument("--binary", required=True)
    parser.add_argument("--schemas", required=True)
    ARGS, rest = parser.parse_known_args()
    unittest.main(argv=[sys.argv[0], *rest])
