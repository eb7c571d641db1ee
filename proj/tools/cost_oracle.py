#!/usr/bin/env python3
# Copyright 2026 The Puda Authors
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

"""Recomputes the byte and token columns of the cost report from the golden
dataset, independently of the C++ bundle code, and writes
fixtures/golden/cost_oracle.json.

For each condition the bundle is {"condition": label} plus the fields the
condition exposes, serialized as minified sorted-key JSON. The token proxy
of a row is ceil(utf8_bytes(query + "\\n\\n" + bundle) / 4).
"""

import json
import math
import pathlib

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"

CONDITIONS = (
    [("no_data", None), ("profile", None)]
    + [(f"categories_{k}", ("categories", k)) for k in (1, 2, 3)]
    + [(f"keywords_{code}", ("keywords", int(code) / 100)) for code in ("090", "085", "080", "075")]
    + [(f"history_{v}", ("history", v)) for v in ("short", "long")]
)


def canonical(value):
    return json.dumps(value, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def bundle(dataset, label, field):
    out = {"condition": label}
    if label == "no_data":
        return out
    out["profile"] = dataset["profile"]
    if field is None:
        return out
    kind, arg = field
    if kind == "categories":
        out["categories"] = dataset["categories"].get(str(arg), [])
    elif kind == "keywords":
        out["keywords"] = [k for k in dataset["keywords"] if k["score"] >= arg]
    else:
        out["history"] = dataset[f"history_{arg}"]
    return out


def main():
    dataset = json.loads((FIXTURES / "golden" / "dataset.json").read_text(encoding="utf-8"))
    queries = json.loads((FIXTURES / "queries.json").read_text(encoding="utf-8"))
    rows = []
    for label, field in CONDITIONS:
        text = canonical(bundle(dataset, label, field))
        size = len(text.encode("utf-8"))
        for q in queries:
            combined = (q["text"] + "\n\n" + text).encode("utf-8")
            rows.append({"condition": label, "query_id": q["id"], "serialized_bytes": size,
                         "token_proxy_in": math.ceil(len(combined) / 4)})
    out = FIXTURES / "golden" / "cost_oracle.json"
    out.write_text(json.dumps(rows, indent=1) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
