#!/usr/bin/env python3
# Copyright 2026 The Billboard Authors.
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
"""Protocol v1 test plugin. The first argument selects the behaviour:

  const V        every score is V
  length         score is the candidate length in characters
  refcount       score is the number of references received
  overlap        token F1 against the best reference (max over references)
  refvalue       score is the last reference parsed as a number
  short          drops the last response line
  hang N         sleeps forever before answering request N (0-based)
  exit N         writes to stderr and exits with status N
  garbage        answers with a non-numeric score
  wrongid        echoes a different id
  env            exits 3 unless BILLBOARD_PROTOCOL_VERSION is 1
"""

import json
import os
import sys
import time
from collections import Counter


def f1(cand, ref):
    c = Counter(cand.lower().split())
    r = Counter(ref.lower().split())
    common = sum((c & r).values())
    if common == 0:
        return 0.0
    p = common / sum(c.values())
    rec = common / sum(r.values())
    return 2 * p * rec / (p + rec)


def main():
    mode = sys.argv[1] if len(sys.argv) > 1 else "const"
    arg = sys.argv[2] if len(sys.argv) > 2 else "1.0"
    if mode == "env" and os.environ.get("BILLBOARD_PROTOCOL_VERSION") != "1":
        sys.stderr.write("unsupported protocol\n")
        return 3
    if mode == "exit":
        sys.stderr.write("plugin failed on purpose\n")
        return int(arg)
    requests = [json.loads(line) for line in sys.stdin if line.strip()]
    out = []
    for i, req in enumerate(requests):
        if mode == "hang" and i == int(arg):
            sys.stdout.write("".join(out))
            sys.stdout.flush()
            out = []
            time.sleep(3600)
        if mode == "length":
            score = float(len(req["candidate"]))
        elif mode == "refcount":
            score = float(len(req["references"]))
        elif mode == "refvalue":
            score = float(req["references"][-1])
        elif mode == "overlap":
            score = max(f1(req["candidate"], r) for r in req["references"])
        elif mode == "garbage":
            out.append(req["id"] + "\tnot-a-number\n")
            continue
        elif mode == "wrongid":
            out.append("zz" + req["id"] + "\t1.0\n")
            continue
        elif mode in ("const", "short", "env", "hang"):
            score = float(arg) if mode == "const" else 1.0
        else:
            sys.stderr.write("unknown mode %s\n" % mode)
            return 2
        out.append("%s\t%r\n" % (req["id"], score))
    if mode == "short" and out:
        out = out[:-1]
    sys.stdout.write("".join(out))
    return 0


if __name__ == "__main__":
    sys.exit(main())
