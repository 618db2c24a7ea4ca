"""Smoke test for the delaychain Python extension.

Build and install the extension first, for example:

    pip install maturin
    maturin build --release -m crates/py/Cargo.toml -o dist
    pip install dist/delaychain-*.whl

then run ``python python/smoke_test.py``.
"""

import math

import delaychain


def main():
    xs, ys = delaychain.synthetic(class_count=2, per_class=6, seed=1)
    assert len(xs) == 12 and sorted(set(ys)) == [0, 1]
    beat = xs[0]

    up, down = delaychain.encode(beat, 0.1)
    assert all(a < b for a, b in zip(up, up[1:]))
    bank = delaychain.encode_bank(beat)
    assert [label for label, _ in bank][:2] == ["adm0_up", "adm0_down"]
    assert len(bank) == 6

    params = delaychain.NeuronParams.delay_default()
    delay = params.measure_delay(10.0)
    assert 0.015 <= delay <= 0.035, delay
    curve = dict(params.f_curve([5.0, 10.0, 20.0]))
    assert curve[10.0] == 10.0

    net = delaychain.Network(thresholds=[0.2, 0.04], steps=5, pool_size=64, cv=0.2)
    assert len(net.chains) == 4 and all(len(c) == 5 for c in net.chains)
    assert net.memory_span > 0
    feats = net.features(beat)
    assert len(feats) == 3 * 2 * 5 and all(math.isfinite(v) for v in feats)
    assert net.features(beat) == feats
    spikes = net.simulate(beat)
    assert net.chains[0][0] in spikes
    assert len(net.preservation(beat, repeats=2)) == 4

    rows = [net.features(x) for x in xs]
    clf = delaychain.Classifier.train(rows, ys, 2, epochs=100)
    acc = clf.accuracy(rows, ys)
    assert 0.0 <= acc <= 1.0

    try:
        delaychain.Network(thresholds=[], steps=5)
    except ValueError:
        pass
    else:
        raise AssertionError("empty thresholds accepted")
    try:
        delaychain.Network(steps=15, pool_size=20)
    except RuntimeError as e:
        assert "exhausted" in str(e)
    else:
        raise AssertionError("pool exhaustion not reported")

    print(f"ok: delay {delay * 1e3:.1f} ms, memory span {net.memory_span:.3f} s, train accuracy {acc:.2f}")


if __name__ == "__main__":
    main()
