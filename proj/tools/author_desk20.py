#!/usr/bin/env python3
# Copyright 2026 The DCO Authors.
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
"""Writes the desk20 corpus, its replay fixtures and the expected verdicts.

Request keys are computed here with hashlib, independently of the C++ code:

  sha256(model "\n" "%.6f" % temperature "\n" system "\n" user "\n" sample)

Usage: author_desk20.py <repo root>
"""

import hashlib
import json
import os
import random
import sys

MODEL = "gpt-3.5-turbo"
TEMPERATURE = 0.8
K = 5
TIMEOUT_MS = 500
SYSTEM = ("You are a programmer. Complete the requested Python function so that it "
          "passes its unit tests. Do not import external libraries.\n")
ENVELOPE = ('Return only a JSON object of the form {"code": "<function source>"} '
            "and no other text.")

# Exact outcome mix over the 100 samples.
MIX = {
    "pass": 50,
    "ExtractionFailure": 15,
    "CompileError": 10,
    "MissingEntryPoint": 5,
    "DisallowedImport": 5,
    "Timeout": 5,
    "TestFailure": 10,
}

# (entry point, signature, docstring, solution body, buggy body, check body)
TASKS = [
    ("add", "a, b", "Return the sum of a and b.",
     "return a + b", "return a - b",
     "assert candidate(2, 3) == 5\n    assert candidate(-1, 1) == 0"),
    ("is_palindrome", "s", "Return True if s reads the same backwards.",
     "return s == s[::-1]", "return s == s[1:]",
     "assert candidate('level')\n    assert not candidate('abc')\n    assert candidate('')"),
    ("count_vowels", "s", "Count the vowels (aeiou, any case) in s.",
     "return sum(1 for c in s.lower() if c in 'aeiou')",
     "return sum(1 for c in s if c in 'aeiou')",
     "assert candidate('Hello') == 2\n    assert candidate('AEIOU') == 5"),
    ("fizzbuzz", "n", "Return 'Fizz', 'Buzz', 'FizzBuzz' or str(n).",
     "if n % 15 == 0:\n        return 'FizzBuzz'\n    if n % 3 == 0:\n        return 'Fizz'\n"
     "    if n % 5 == 0:\n        return 'Buzz'\n    return str(n)",
     "if n % 3 == 0:\n        return 'Fizz'\n    if n % 5 == 0:\n        return 'Buzz'\n"
     "    return str(n)",
     "assert candidate(15) == 'FizzBuzz'\n    assert candidate(9) == 'Fizz'\n"
     "    assert candidate(10) == 'Buzz'\n    assert candidate(7) == '7'"),
    ("factorial", "n", "Return n! for n >= 0.",
     "result = 1\n    for i in range(2, n + 1):\n        result *= i\n    return result",
     "result = 1\n    for i in range(2, n):\n        result *= i\n    return result",
     "assert candidate(0) == 1\n    assert candidate(5) == 120"),
    ("fib", "n", "Return the n-th Fibonacci number, fib(0) == 0.",
     "a, b = 0, 1\n    for _ in range(n):\n        a, b = b, a + b\n    return a",
     "a, b = 1, 1\n    for _ in range(n):\n        a, b = b, a + b\n    return a",
     "assert candidate(0) == 0\n    assert candidate(10) == 55"),
    ("max_of", "xs", "Return the largest element of a non-empty list.",
     "best = xs[0]\n    for x in xs:\n        if x > best:\n            best = x\n    return best",
     "return xs[-1]",
     "assert candidate([3, 9, 2]) == 9\n    assert candidate([-5]) == -5"),
    ("reverse_words", "s", "Reverse the order of the words in s.",
     "return ' '.join(reversed(s.split()))", "return s[::-1]",
     "assert candidate('a b c') == 'c b a'\n    assert candidate('hello world') == 'world hello'"),
    ("is_prime", "n", "Return True if n is prime.",
     "if n < 2:\n        return False\n    i = 2\n    while i * i <= n:\n"
     "        if n % i == 0:\n            return False\n        i += 1\n    return True",
     "return n % 2 == 1",
     "assert candidate(2)\n    assert candidate(13)\n    assert not candidate(9)\n"
     "    assert not candidate(1)"),
    ("gcd", "a, b", "Return the greatest common divisor of a and b.",
     "while b:\n        a, b = b, a % b\n    return a", "return min(a, b)",
     "assert candidate(12, 18) == 6\n    assert candidate(7, 5) == 1"),
    ("sum_digits", "n", "Return the sum of the decimal digits of n >= 0.",
     "return sum(int(c) for c in str(n))", "return len(str(n))",
     "assert candidate(1234) == 10\n    assert candidate(0) == 0"),
    ("unique_sorted", "xs", "Return the sorted list of distinct elements.",
     "return sorted(set(xs))", "return sorted(xs)",
     "assert candidate([3, 1, 3, 2]) == [1, 2, 3]\n    assert candidate([]) == []"),
    ("capitalize_words", "s", "Uppercase the first letter of every word.",
     "return ' '.join(w[:1].upper() + w[1:] for w in s.split(' '))",
     "return s.upper()",
     "assert candidate('hello world') == 'Hello World'"),
    ("running_sum", "xs", "Return the list of prefix sums of xs.",
     "out = []\n    total = 0\n    for x in xs:\n        total += x\n        out.append(total)\n"
     "    return out",
     "return list(xs)",
     "assert candidate([1, 2, 3]) == [1, 3, 6]\n    assert candidate([]) == []"),
    ("count_words", "s", "Return a dict of word -> occurrences.",
     "counts = {}\n    for w in s.split():\n        counts[w] = counts.get(w, 0) + 1\n"
     "    return counts",
     "return {w: 1 for w in s.split()}",
     "assert candidate('a b a') == {'a': 2, 'b': 1}"),
    ("flatten", "xss", "Flatten one level of nesting.",
     "return [x for xs in xss for x in xs]", "return xss[0] if xss else []",
     "assert candidate([[1], [2, 3], []]) == [1, 2, 3]"),
    ("celsius_to_f", "c", "Convert Celsius to Fahrenheit.",
     "return c * 9 / 5 + 32", "return c * 5 / 9 + 32",
     "assert candidate(100) == 212\n    assert candidate(0) == 32"),
    ("second_largest", "xs", "Return the second largest distinct value.",
     "return sorted(set(xs))[-2]", "return sorted(xs)[-2]",
     "assert candidate([4, 1, 4, 3]) == 3\n    assert candidate([1, 2]) == 1"),
    ("rle", "s", "Run-length encode s, e.g. 'aab' -> 'a2b1'.",
     "out = ''\n    i = 0\n    while i < len(s):\n        j = i\n"
     "        while j < len(s) and s[j] == s[i]:\n            j += 1\n"
     "        out += s[i] + str(j - i)\n        i = j\n    return out",
     "return ''.join(c + '1' for c in s)",
     "assert candidate('aab') == 'a2b1'\n    assert candidate('') == ''"),
    ("anagrams", "a, b", "Return True if a and b are anagrams.",
     "return sorted(a) == sorted(b)", "return set(a) == set(b)",
     "assert candidate('listen', 'silent')\n    assert not candidate('aab', 'abb')"),
]


def function(name, sig, doc, body):
    return f'def {name}({sig}):\n    """{doc}"""\n    {body}\n'


def prompt_of(name, sig, doc):
    return f'def {name}({sig}):\n    """{doc}"""\n'


def request_key(user, sample):
    text = f"{MODEL}\n{TEMPERATURE:.6f}\n{SYSTEM}\n{user}\n{sample}"
    return hashlib.sha256(text.encode()).hexdigest()


def envelope(code):
    return json.dumps({"code": code})


def fenced(code):
    return "Here you go:\n\n```python\n" + code + "```\n"


def reply_for(verdict, task, variant):
    name, sig, doc, good, bad, _ = task
    if verdict == "pass":
        code = function(name, sig, doc, good)
        return [envelope, fenced, lambda c: c, envelope][variant % 4](code)
    if verdict == "ExtractionFailure":
        return [
            "I'm sorry, but I need more details about the expected behaviour.",
            "```python\n" + function(name, sig, doc, good),
            "```python\n\n```\nThe function is straightforward.",
        ][variant % 3]
    if verdict == "CompileError":
        return envelope(f"def {name}({sig})\n    return None\n")
    if verdict == "MissingEntryPoint":
        return envelope(function("solution", sig, doc, good))
    if verdict == "DisallowedImport":
        return envelope(f"def {name}({sig}):\n    import numpy as np\n    {good}\n")
    if verdict == "Timeout":
        return envelope(f"def {name}({sig}):\n    while True:\n        pass\n")
    if verdict == "TestFailure":
        return envelope(function(name, sig, doc, bad))
    raise ValueError(verdict)


def main(root):
    verdicts = [v for v, n in MIX.items() for _ in range(n)]
    random.Random(2026).shuffle(verdicts)
    assert len(verdicts) == len(TASKS) * K

    corpus, fixtures, expected = [], [], []
    seen = {}
    for t, task in enumerate(TASKS):
        name, sig, doc, _, _, check = task
        task_id = f"desk20/{t:02d}"
        prompt = prompt_of(name, sig, doc)
        corpus.append({
            "task_id": task_id,
            "prompt": prompt,
            "entry_point": name,
            "tests": f"def check(candidate):\n    {check}\n",
            "timeout_ms": TIMEOUT_MS,
        })
        user = prompt + "\n\n" + ENVELOPE
        for sample in range(K):
            verdict = verdicts[t * K + sample]
            seen[verdict] = seen.get(verdict, 0) + 1
            fixtures.append({"key": request_key(user, sample),
                             "response": reply_for(verdict, task, seen[verdict])})
            expected.append({"task_id": task_id, "sample_index": sample,
                             "verdict": verdict})

    def write_jsonl(path, rows):
        with open(path, "w") as f:
            for row in rows:
                f.write(json.dumps(row, sort_keys=True) + "\n")

    write_jsonl(os.path.join(root, "corpus", "desk20.jsonl"), corpus)
    write_jsonl(os.path.join(root, "fixtures", "desk20.jsonl"), fixtures)
    with open(os.path.join(root, "fixtures", "desk20.expected.json"), "w") as f:
        json.dump(expected, f, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else os.getcwd())
