#!/usr/bin/env python3
"""Convert controller weights to the symreach network JSON format.

Supported inputs:
  sherlock  plain-text format: n_in, n_out, n_hidden_layers, the hidden
            sizes, then for every neuron of every layer its incoming
            weights followed by its bias
  nnet      the .nnet text format; input/output normalisation is folded
            into the first and last layers, input clipping is dropped
  mat       MATLAB file with cell arrays `W` and `b` (needs scipy)

Hidden layers get --hidden (default relu), the last layer --output
(default linear).
"""

import argparse
import json
import sys


def read_numbers(path):
    vals = []
    with open(path) as f:
        for line in f:
            line = line.split("//")[0].strip()
            if not line:
                continue
            vals.extend(float(t) for t in line.replace(",", " ").split())
    return vals


def from_sherlock(path):
    vals = read_numbers(path)
    pos = 0

    def take(n):
        nonlocal pos
        out = vals[pos:pos + n]
        if len(out) != n:
            raise ValueError("sherlock file ends early")
        pos += n
        return out

    n_in, n_out, n_hidden = (int(v) for v in take(3))
    sizes = [n_in] + [int(v) for v in take(n_hidden)] + [n_out]
    layers = []
    for k in range(len(sizes) - 1):
        rows, bias = [], []
        for _ in range(sizes[k + 1]):
            rows.append(take(sizes[k]))
            bias.append(take(1)[0])
        layers.append((rows, bias))
    if pos != len(vals):
        raise ValueError(f"{len(vals) - pos} trailing numbers in sherlock file")
    return layers


def from_nnet(path):
    lines = []
    with open(path) as f:
        for line in f:
            line = line.strip()
            if line and not line.startswith("//"):
                lines.append([float(t) for t in line.rstrip(",").split(",") if t.strip()])
    n_layers, n_in, n_out = (int(v) for v in lines[0][:3])
    sizes = [int(v) for v in lines[1]]
    means, ranges = lines[5], lines[6]
    pos = 7
    layers = []
    for k in range(n_layers):
        rows = lines[pos:pos + sizes[k + 1]]
        pos += sizes[k + 1]
        bias = [l[0] for l in lines[pos:pos + sizes[k + 1]]]
        pos += sizes[k + 1]
        layers.append((rows, bias))
    # x_norm = (x - mean) / range on the inputs, y = y_norm * range + mean on the outputs
    rows, bias = layers[0]
    bias = [b - sum(w * means[i] / ranges[i] for i, w in enumerate(r)) for r, b in zip(rows, bias)]
    rows = [[w / ranges[i] for i, w in enumerate(r)] for r in rows]
    layers[0] = (rows, bias)
    rows, bias = layers[-1]
    m, s = means[n_in], ranges[n_in]
    layers[-1] = ([[w * s for w in r] for r in rows], [b * s + m for b in bias])
    if sizes[0] != n_in or sizes[-1] != n_out:
        raise ValueError("nnet header and layer sizes disagree")
    return layers


def from_mat(path):
    from scipy.io import loadmat

    data = loadmat(path)
    ws, bs = data["W"].ravel(), data["b"].ravel()
    return [([list(map(float, r)) for r in w], [float(v) for v in b.ravel()]) for w, b in zip(ws, bs)]


READERS = {"sherlock": from_sherlock, "nnet": from_nnet, "mat": from_mat}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("input")
    ap.add_argument("output")
    ap.add_argument("--format", choices=sorted(READERS), required=True)
    ap.add_argument("--hidden", default="relu")
    ap.add_argument("--output-activation", dest="out_act", default="linear")
    args = ap.parse_args(argv)

    layers = READERS[args.format](args.input)
    doc = {"layers": [
        {"activation": args.out_act if k == len(layers) - 1 else args.hidden, "bias": b, "weights": w}
        for k, (w, b) in enumerate(layers)
    ]}
    with open(args.output, "w") as f:
        json.dump(doc, f)
        f.write("\n")
    shape = [len(layers[0][0][0])] + [len(b) for _, b in layers]
    print(f"{args.output}: {tuple(shape)}", file=sys.stderr)


if __name__ == "__main__":
    main()
