#!/usr/bin/env python3
"""Independent recomputation of the cryptosystem test vectors.

Recomputes, with plain Python integers only, every frozen value the C++
test suites assert for the toy parameter set (p=3, q=5, a=2) plus the
keyword-encoding and weighting examples. Prints `name=value` lines; the
golden file next to this script is compared by the test runner.
"""

import math


def lines():
    # --- toy parameter set ---
    p, q, a = 3, 5, 2
    n = p * q
    n_sq = n * n
    lam = math.lcm(p - 1, q - 1)
    g = (-pow(a, 2 * n, n_sq)) % n_sq
    yield "n", n
    yield "g", g
    yield "lambda", lam
    yield "g_pow_lambda", pow(g, lam, n_sq)

    # user key sk=3
    sk = 3
    pk = pow(g, sk, n_sq)
    yield "pk", pk

    # encryption of m=7 with r=1
    m, r = 7, 1
    c1 = (pow(pk, r, n_sq) * (1 + m * n)) % n_sq
    c2 = pow(g, r, n_sq)
    yield "c1", c1
    yield "c2", c2

    # weak decryption
    inv = pow(pow(c2, sk, n_sq), -1, n_sq)
    x = (c1 * inv) % n_sq
    yield "weak_l_arg", x
    assert (x - 1) % n == 0
    yield "weak_m", (x - 1) // n

    # strong decryption
    xs = pow(c1, lam, n_sq)
    yield "strong_l_arg", xs
    ls = (xs - 1) // n
    yield "strong_m", (ls * pow(lam, -1, n)) % n

    # key split: unique x in [0, lam*n) with x=0 mod lam, x=1 mod n,
    # found by brute force
    sigmas = [x for x in range(lam * n) if x % lam == 0 and x % n == 1]
    assert len(sigmas) == 1
    yield "sigma", sigmas[0]

    # partial decryption chain with the split 5 + 11 = 16
    lam1, lam2 = 5, 11
    assert (lam1 + lam2) % (lam * n) == sigmas[0]
    partial = pow(c1, lam1, n_sq)
    yield "partial1", partial
    other = pow(c1, lam2, n_sq)
    yield "partial2", other
    combined = (partial * other) % n_sq
    yield "combined", combined
    assert (combined - 1) % n == 0
    yield "partial_m", (combined - 1) // n

    # --- keyword encoding: little-endian base-65536 over UTF-16 units ---
    def encode(word):
        units = word.encode("utf-16-le")
        total = 0
        for i in range(0, len(units), 2):
            unit = units[i] | (units[i + 1] << 8)
            total += unit * (1 << (16 * (i // 2)))
        return total

    yield "k2u_a", encode("a")
    yield "k2u_ab", encode("ab")
    yield "k2u_zhong", encode("中")

    # --- tf-idf example: count=2 len=10 M=8 df=2, scale 1000 ---
    alpha = round(1000 * (2 / 10) * math.log(8 / 2))
    yield "tfidf_example", alpha


def main():
    for name, value in lines():
        print(f"{name}={value}")


if __name__ == "__main__":
    main()
