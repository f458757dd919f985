"""Benchmark the compiled kernels against the numpy fallback.

Times the two hot kernels (Conv1D and LSTM, forward + backward) at the
production shapes of the hybrid regressor, then a full training epoch with
each backend swapped in. Run: python benchmarks/bench_kernels.py
"""
import time

import numpy as np

import wqnet._kernels as kernels
from wqnet._kernels import available_backends


def _time(fn, repeats=200):
    fn()  # warm up
    start = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - start) / repeats


def bench_kernels():
    backends = available_backends()
    rng = np.random.Generator(np.random.PCG64(0))
    # hybrid regressor shapes: batch 32, 4 timesteps, 1 channel
    x = np.ascontiguousarray(rng.normal(size=(32, 4, 1)))
    cw = np.ascontiguousarray(rng.normal(size=(3, 1, 32)))
    cb = rng.normal(size=32)
    wx = np.ascontiguousarray(rng.normal(size=(1, 256)))
    wh = np.ascontiguousarray(rng.normal(size=(64, 256)) * 0.2)
    lb = rng.normal(size=256)

    rows = []
    for name, mod in sorted(backends.items()):
        pre = mod.conv1d_forward(x, cw, cb)
        dpre = np.ascontiguousarray(rng.normal(size=pre.shape))
        _, cache = mod.lstm_forward(x, wx, wh, lb)
        dh = np.ascontiguousarray(rng.normal(size=(32, 64)))
        rows.append((
            name,
            _time(lambda: mod.conv1d_forward(x, cw, cb)),
            _time(lambda: mod.conv1d_backward(x, cw, dpre)),
            _time(lambda: mod.lstm_forward(x, wx, wh, lb)),
            _time(lambda: mod.lstm_backward(x, wx, wh, cache, dh)),
        ))

    print("kernel timings (per call, batch 32)")
    header = f"{'backend':8} {'conv fwd':>10} {'conv bwd':>10} {'lstm fwd':>10} {'lstm bwd':>10}"
    print(header)
    for name, cf, cb_, lf, lb_ in rows:
        print(f"{name:8} {cf * 1e6:9.1f}u {cb_ * 1e6:9.1f}u {lf * 1e6:9.1f}u {lb_ * 1e6:9.1f}u")
    if len(rows) == 2:
        py = next(r for r in rows if r[0] == "py")
        cc = next(r for r in rows if r[0] == "c")
        speedups = [p / c for p, c in zip(py[1:], cc[1:])]
        print("speedup  " + " ".join(f"{s:9.1f}x" for s in speedups))
    print()


def bench_training_epochs():
    from wqnet.data import SyntheticConfig, Task, generate_synthetic
    from wqnet.models import train_pipeline
    from wqnet.training import TrainConfig

    backends = available_backends()
    ds = generate_synthetic(SyntheticConfig(n=400, seed=1, noise_sd=2.0))
    saved = (kernels.conv1d_forward, kernels.conv1d_backward,
             kernels.lstm_forward, kernels.lstm_backward)
    print("hybrid regressor, 5 epochs on 400 rows")
    try:
        for name, mod in sorted(backends.items()):
            kernels.conv1d_forward = mod.conv1d_forward
            kernels.conv1d_backward = mod.conv1d_backward
            kernels.lstm_forward = mod.lstm_forward
            kernels.lstm_backward = mod.lstm_backward
            start = time.perf_counter()
            train_pipeline(ds, Task.REGRESSION, TrainConfig(epochs=5))
            print(f"{name:8} {time.perf_counter() - start:6.2f}s")
    finally:
        (kernels.conv1d_forward, kernels.conv1d_backward,
         kernels.lstm_forward, kernels.lstm_backward) = saved


if __name__ == "__main__":
    print(f"active backend: {kernels.BACKEND}")
    bench_kernels()
    bench_training_epochs()
