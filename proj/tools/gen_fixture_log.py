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

"""Writes fixtures/events_50.jsonl, a 50-record event log in the store's
line format, encoded here without the C++ code:

    <minified sorted-key JSON> <crc32 as 8 lowercase hex digits>\\n

Payloads are short on purpose: tests truncate this file at every byte.
"""

import json
import pathlib
import zlib
from datetime import datetime, timedelta, timezone

OUT = pathlib.Path(__file__).resolve().parent.parent / "fixtures" / "events_50.jsonl"
USER = "taro"
START = datetime(2026, 4, 1, 9, 0, 0, tzinfo=timezone.utc)
PLACES = ["hakone", "kusatsu", "beppu", "gero", "nikko", "atami", "arima", "dogo"]


def stamp(t):
    return t.strftime("%Y-%m-%dT%H:%M:%S.") + f"{t.microsecond // 1000:03d}Z"


def canonical(value):
    return json.dumps(value, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def payload_for(i, at):
    if i % 10 == 7:
        return "grant_created", {"grant_id": f"{i:032x}", "scopes": ["puda:profile"],
                                 "client_id": "c" * 32, "user_id": USER}
    if i % 10 == 8:
        return "token_issued", {"grant_id": f"{i - 1:032x}", "jti": f"{i:032x}"}
    if i == 49:
        return "grant_revoked", {"grant_id": f"{47:032x}", "revoked_at": stamp(at)}
    place = PLACES[i % len(PLACES)]
    return "capture", {
        "url": f"https://onsen.example.jp/{place}/{i}",
        "title": f"{place.title()} 温泉 {i}",
        "html_body": f"<p>{place} day {i}</p>",
        "captured_at": stamp(at - timedelta(seconds=30)),
        "user_id": USER,
    }


def main():
    lines = []
    for i in range(50):
        at = START + timedelta(minutes=11 * i, milliseconds=37 * i)
        kind, payload = payload_for(i, at)
        body = canonical({"offset": i, "kind": kind, "payload": payload, "recorded_at": stamp(at)})
        crc = zlib.crc32(body.encode("utf-8")) & 0xFFFFFFFF
        lines.append(f"{body} {crc:08x}\n")
    OUT.write_text("".join(lines), encoding="utf-8")


if __name__ == "__main__":
    main()
