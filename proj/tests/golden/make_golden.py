# Copyright 2026 The kbreason Authors. All Rights Reserved.
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

"""Regenerates the /predict golden pair.

The stub model frames each request as "[CLS] c1 c2 ... [SEP] h [SEP]" and
answers p_true = (fnv1a64(frame) % 1001) / 1000. The C++ stub server in
test_protocol.cpp must reproduce responses.jsonl byte for byte.
"""

import json
import pathlib

HERE = pathlib.Path(__file__).parent

REQUESTS = [
    {"id": "g-0001", "context": ["A mammal has a belly button.", "A whale is a mammal."],
     "hypothesis": "A whale has a belly button."},
    {"id": "g-0002", "context": [], "hypothesis": "A whale is a mammal."},
    {"id": "g-0003", "context": ["A fish does not have a belly button.", "A whale is not a fish."],
     "hypothesis": "A whale does not have a belly button."},
    {"id": "g-0004", "context": ["Anne is a member of Gerrit.", "Bert is a member of Gerrit.",
                                 "Gerrit has two members."],
     "hypothesis": "Cora is not a member of Gerrit."},
    {"id": "g-0005", "context": ["He said \"hello\" to a back\\slash."],
     "hypothesis": "A tab\tand a slash / are fine."},
    {"id": "g-0006", "context": ["If a thing is a wug then it is a dax."],
     "hypothesis": "A blicket is a dax."},
]


def fnv1a64(text):
    h = 14695981039346656037
    for b in text.encode("utf-8"):
        h ^= b
        h = (h * 1099511628211) % (1 << 64)
    return h


def frame(req):
    return " ".join(["[CLS]", *req["context"], "[SEP]", req["hypothesis"], "[SEP]"])


def dump(record):
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


def main():
    with open(HERE / "requests.jsonl", "w", newline="\n") as f:
        for r in REQUESTS:
            f.write(dump(r) + "\n")
    with open(HERE / "responses.jsonl", "w", newline="\n") as f:
        for r in REQUESTS:
            f.write(dump({"id": r["id"], "p_true": (fnv1a64(frame(r)) % 1001) / 1000}) + "\n")


if __name__ == "__main__":
    main()
