#!/usr/bin/env python3
# Copyright 2026 The Authors.
#
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


"""Compares full-scale pipeline outputs with reference color counts and
average collision counts per test example.

A dataset passes when its greedy color count is within a factor of two of
the reference and its collision count is within 0.1.
"""

import json
import pathlib
import sys

REFERENCE = {
    "url": {"colors": 395, "collisions": 0.40},
    "kdda": {"colors": 103, "collisions": 0.30},
    "kddb": {"colors": 79, "collisions": 0.21},
    "kdd12": {"colors": 22, "collisions": 0.09},
}


def stage_json(root: pathlib.Path, stage: str) -> dict:
    manifest = json.loads((root / "manifest.json").read_text())
    files = [f for f in manifest[stage]["files"] if f.endswith(".json")]
    return json.loads((root / files[0]).read_text())


def main() -> int:
    out_dir = pathlib.Path(sys.argv[1])
    failures = 0
    for name in sys.argv[2:]:
        root = out_dir / name
        colors = stage_json(root, "color")["coloring"]["colors"]
        rows = stage_json(root, "fidelity")["fidelity"]["rows"]
        collisions = next(r["greedy_avg_collisions"] for r in rows if r["k"] == 1)
        ref = REFERENCE[name]
        ok = ref["colors"] / 2 <= colors <= ref["colors"] * 2 and \
            abs(collisions - ref["collisions"]) <= 0.1
        failures += not ok
        print(f"{name}: {'PASS' if ok else 'FAIL'} colors {colors} "
              f"(reference {ref['colors']}), collisions {collisions:.3f} "
              f"(reference {ref['collisions']:.2f})")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
