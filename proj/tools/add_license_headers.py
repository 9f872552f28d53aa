#!/usr/bin/env python3
"""Prepends the Apache 2.0 header to every C++ source under the given roots.

Idempotent: files that already carry the header are left alone.
"""
import pathlib
import sys

HEADER = """// {path}

// Copyright 2026 The medleysep Authors

// See the top-level LICENSE file for the full license text.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

"""
MARKER = "// Copyright 2026 The medleysep Authors"
SUFFIXES = {".h", ".cpp"}


def main(argv):
    repo = pathlib.Path(__file__).resolve().parent.parent
    roots = argv[1:] or ["include", "src", "tests", "tools"]
    changed = 0
    for root in roots:
        for path in sorted((repo / root).rglob("*")):
            if path.suffix not in SUFFIXES or not path.is_file():
                continue
            text = path.read_text(encoding="utf-8")
            if MARKER in text[:400]:
                continue
            rel = path.relative_to(repo).as_posix()
            path.write_text(HEADER.format(path=rel) + text, encoding="utf-8")
            changed += 1
    print(f"added headers to {changed} file(s)")


if __name__ == "__main__":
    main(sys.argv)
