import itertools
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from paintdrone.vision.filters import (DegenerateImageWarning, gabor_pca_filter,
                                       mexican_hat_filter, ricker_kernel)
from paintdrone.vision.hopfield import (SWEEP_CAP, default_net, parse_vector, recall,
                                        train_hopfield)
from paintdrone.vision.pgm import (PGMError, encode_pgm, from_gray, parse_pgm, read_pgm, to_gray,
                                   write_pgm)
from paintdrone.vision.pipeline import (InspectionConfig, decision_rows, evaluate_corpus,
                                        inspect_image, score_rows)
from paintdrone.vision.segment import (NoSidewalkError, decide_repaints, merge_decisions,
                                       segment_columns, ternarize)
from paintdrone.vision.synth import (CorpusConfigError, CorpusSpec, corpus_spec_from_dict,
                                     generate_synthetic, read_rows, write_corpus)

TERNARY = list(itertools.product((-1, 0, 1), repeat=3))
W_TWO = [[0, -2, 2], [-2, 0, -2], [2, -2, 0]]


# --------------------------------------------------------------------- PGM

def test_pgm_round_trip_binary_and_ascii(tmp_path):
    rng = np.random.default_rng(3)
    px = rng.integers(0, 256, size=(7, 11), dtype=np.uint8)
    for binary in (True, False):
        p = write_pgm(tmp_path / f"x{binary}.pgm", px, binary=binary)
        assert np.array_equal(read_pgm(p), px)


def test_pgm_comments_and_maxval():
    data = b"P2\n# made by hand\n3 1 # width height\n15\n0 15 # trailing\n 5\n"
    assert parse_pgm(data).tolist() == [[0, 255, 85]]


@pytest.mark.parametrize("data,msg", [
    (b"P6\n1 1\n255\n\x00\x00\x00", "magic"),
    (b"P5\n2 2\n255\n\x00", "pixel bytes"),
    (b"P2\n2 1\n255\n1\n", "pixel values"),
    (b"P2\n1 1\n65535\n1\n", "8-bit"),
    (b"P2\n1 1\n255\n300\n", "outside"),
    (b"P2\n1", "truncated"),
])
def test_pgm_errors(data, msg):
    with pytest.raises(PGMError, match=msg):
        parse_pgm(data)


def test_gray_scaling():
    g = to_gray(np.array([[0, 255]], dtype=np.uint8))
    assert g.tolist() == [[-1.0, 1.0]]
    px = np.arange(256, dtype=np.uint8).reshape(16, 16)
    assert np.array_equal(from_gray(to_gray(px)), px)


# ----------------------------------------------------------------- filters

def _brute_convolve(img, k):
    """Direct same-size convolution with symmetric (edge-repeating) padding."""
    r = k.shape[0] // 2
    padded = np.pad(img, r, mode="symmetric")
    flipped = k[::-1, ::-1]
    out = np.zeros_like(img)
    for i in range(img.shape[0]):
        for j in range(img.shape[1]):
            out[i, j] = np.sum(padded[i:i + 2 * r + 1, j:j + 2 * r + 1] * flipped)
    return out


def test_kernel_zero_mean():
    for s in (1.0, 2.0, 3.5):
        assert abs(ricker_kernel(s).sum()) < 1e-12


def test_constant_image_zero_response():
    out = mexican_hat_filter(np.full((20, 30), 0.3), 2.0)
    assert np.max(np.abs(out)) < 1e-12


def test_step_edge_matches_oracle_and_peaks_at_edge():
    img = np.full((16, 16), -1.0)
    img[:, 8:] = 1.0
    out = mexican_hat_filter(img, 1.0)
    assert np.allclose(out, _brute_convolve(img, ricker_kernel(1.0)), atol=1e-12)
    profile = np.abs(out).max(axis=0)
    # The edge lies between columns 7 and 8. The continuous extrema sit one
    # scale from the edge, so columns 6 and 7 (and 8, 9) nearly tie.
    assert int(np.argmax(profile)) in (6, 7, 8, 9)
    assert profile[7] == pytest.approx(profile.max(), rel=1e-4)
    assert profile[8] == pytest.approx(profile.max(), rel=1e-4)
    assert np.all(profile[:4] < 1e-12) and np.all(profile[12:] < 1e-12)


@pytest.mark.parametrize("shape,scale", [((16, 16), 1.0), ((40, 25), 2.0), ((33, 60), 3.0)])
def test_same_resolution(shape, scale):
    img = np.random.default_rng(0).uniform(-1, 1, shape)
    assert mexican_hat_filter(img, scale).shape == shape


def test_kernel_larger_than_image_rejected():
    with pytest.raises(ValueError, match="larger"):
        mexican_hat_filter(np.zeros((10, 10)), 2.0)


def test_scale_below_one_rejected():
    with pytest.raises(ValueError):
        ricker_kernel(0.5)


def test_gabor_constant_image_warns():
    with pytest.warns(DegenerateImageWarning):
        out = gabor_pca_filter(np.full((32, 32), 0.2))
    assert np.all(out == 0.0)


def test_gabor_separates_textures():
    img = np.zeros((48, 64))
    cols = np.arange(32)
    img[:, :32] = np.where((cols // 2) % 2 == 0, 1.0, -1.0)
    out = gabor_pca_filter(img)
    # Stay clear of the seam and the kernels' reach.
    left, right = out[8:-8, 4:24], out[8:-8, 44:60]
    gap = abs(left.mean() - right.mean())
    assert gap > max(left.std(), right.std())


@given(arrays(np.float64, (32, 32), elements=st.floats(-1, 1)))
def test_gabor_output_in_range(img):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateImageWarning)
        out = gabor_pca_filter(img)
    assert out.shape == img.shape
    assert np.all(np.abs(out) <= 1.0)


# ------------------------------------------------------------ segmentation

def _stripes(widths, colors, height=24):
    img = np.concatenate([np.full((height, w), float(c)) for w, c in zip(widths, colors)], axis=1)
    return img


def test_three_stripes_three_segments():
    img = _stripes([30, 25, 35], [1, -1, 1])
    segs = segment_columns(mexican_hat_filter(img, 2.0), img, 0.05)
    assert [s.value for s in segs] == [1, -1, 1]
    for s, (a, b) in zip(segs, [(0, 30), (30, 55), (55, 90)]):
        assert abs(s.start - a) <= 2 and abs(s.end - b) <= 2


def test_all_black_one_segment():
    img = np.full((20, 40), -1.0)
    segs = segment_columns(mexican_hat_filter(img, 2.0), img, 0.05)
    assert len(segs) == 1 and segs[0].value == -1


def test_boundary_everywhere_is_no_sidewalk():
    img = np.zeros((10, 20))
    with pytest.raises(NoSidewalkError, match="no sidewalk"):
        segment_columns(np.ones_like(img), img, 0.5)


def test_segments_tile_the_width():
    spec = CorpusSpec(count=5, seed=11)
    for im in generate_synthetic(spec):
        gray = to_gray(im.pixels)
        segs = segment_columns(mexican_hat_filter(gray, 2.0), gray, 0.05)
        assert segs[0].start == 0 and segs[-1].end == spec.width
        assert all(a.end == b.start for a, b in zip(segs, segs[1:]))


def test_generator_widths_recovered():
    spec = CorpusSpec(count=20, erasure_rate=0.0, seed=5)
    for im in generate_synthetic(spec):
        gray = to_gray(im.pixels)
        segs = segment_columns(mexican_hat_filter(gray, 2.0), gray, 0.05)
        assert len(segs) == len(im.widths)
        for s, w in zip(segs, im.widths):
            assert abs(s.width - w) <= 2


def test_shape_mismatch_rejected():
    with pytest.raises(ValueError):
        segment_columns(np.zeros((4, 5)), np.zeros((4, 6)), 0.1)


@pytest.mark.parametrize("white,black,expected", [
    (1.0, 0.0, 1), (0.0, 1.0, -1), (0.4, 0.35, 0), (0.7, 0.0, 1), (0.0, 0.7, -1), (0.69, 0.3, 0),
])
def test_ternarize(white, black, expected):
    assert ternarize(white, black, 0.7) == expected


@given(st.floats(0.05, 0.95))
def test_ternarize_boundary_inclusive(tau):
    assert ternarize(tau, 0.0, tau) == 1
    assert ternarize(0.0, tau, tau) == -1


def test_ternarize_rejects_bad_fraction():
    with pytest.raises(ValueError):
        ternarize(1.2, 0.0)


# ---------------------------------------------------------------- Hopfield

def test_two_memory_weights():
    assert default_net().weights.tolist() == W_TWO


def test_single_memory_weights():
    assert train_hopfield([(1, 1, 1)]).weights.tolist() == [[0, 1, 1], [1, 0, 1], [1, 1, 0]]


@given(st.lists(st.tuples(*[st.sampled_from((-1, 1))] * 3), min_size=1, max_size=2))
def test_weights_symmetric_zero_diagonal(mems):
    w = train_hopfield(mems).weights
    assert np.array_equal(w, w.T)
    assert np.all(np.diag(w) == 0)


@pytest.mark.parametrize("bad", [[(1, 1)], [(1, 0, 1)], [], [(1, 1, 1)] * 3])
def test_bad_memories(bad):
    with pytest.raises(ValueError):
        train_hopfield(bad)


def test_memories_recall_in_one_sweep():
    net = default_net()
    for m in net.memories:
        r = recall(net, m)
        assert (r.final, r.sweeps, r.converged) == (m, 1, True)


def test_partial_input_recall():
    r = recall(default_net(), (0, -1, 1))
    assert r.final == (1, -1, 1) and r.sweeps == 2
    assert r.describe() == "memory matched in 2 sweeps: [1,-1,1]"


@pytest.mark.parametrize("vec", [(1, 0, 1), (1, -1, 0)])
def test_other_partial_inputs(vec):
    r = recall(default_net(), vec)
    assert (r.final, r.sweeps) == ((1, -1, 1), 2)


def test_all_zero_is_unrecognizable():
    r = recall(default_net(), (0, 0, 0))
    assert not r.recognised
    assert r.describe().startswith("unrecognizable")


def oracle_recall(w, s, cap=SWEEP_CAP):
    """Plain-Python synchronous sweeps, sign(0) keeping the old component."""
    states = [tuple(s)]
    for n in range(1, cap + 1):
        new = []
        for i in range(3):
            h = sum(w[i][j] * s[j] for j in range(3))
            new.append(s[i] if h == 0 else (1 if h > 0 else -1))
        new = tuple(new)
        if new == tuple(s):
            return new, n, True, states
        s = new
        states.append(new)
    return tuple(s), cap, False, states


def test_exhaustive_oracle_equivalence():
    net = default_net()
    for v in TERNARY:
        r = recall(net, v)
        final, sweeps, conv, states = oracle_recall(W_TWO, v)
        assert (r.final, r.sweeps, r.converged, list(r.states)) == (final, sweeps, conv, states)


def test_all_nonzero_inputs_converge_within_three_sweeps():
    # Stated example: every ternary input other than [0,0,0] settles on a memory.
    net = default_net()
    slow = [v for v in TERNARY if v != (0, 0, 0)
            if not (recall(net, v).recognised and recall(net, v).sweeps <= 3)]
    assert slow == []


def test_no_long_limit_cycles():
    # Non-convergent inputs cycle with period 2, well inside the cap.
    net = default_net()
    for v in TERNARY:
        r = recall(net, v)
        if not r.converged:
            assert r.states[0] == r.states[2]


def test_sign_symmetry():
    net = default_net()
    for v in TERNARY:
        a = recall(net, v)
        b = recall(net, tuple(-x for x in v))
        assert b.final == tuple(-x for x in a.final)
        assert (b.sweeps, b.converged) == (a.sweeps, a.converged)


def test_energy_non_increasing_asynchronously():
    net = default_net()
    w = np.array(W_TWO)
    for v in itertools.product((-1, 1), repeat=3):
        s = list(v)
        for i in itertools.islice(itertools.cycle(range(3)), 12):
            before = net.energy(s)
            h = int(w[i] @ np.array(s))
            if h != 0:
                s[i] = 1 if h > 0 else -1
            assert net.energy(s) <= before


@pytest.mark.parametrize("text,vec", [("0,-1,1", (0, -1, 1)), ("[1, 1, -1]", (1, 1, -1))])
def test_parse_vector(text, vec):
    assert parse_vector(text) == vec


@pytest.mark.parametrize("text", ["1,2,0", "1,1", "a,b,c", "0.5,0,0"])
def test_parse_vector_errors(text):
    with pytest.raises(ValueError):
        parse_vector(text)


# --------------------------------------------------------------- decisions

def _actions(values):
    net = default_net()
    return merge_decisions(values, decide_repaints(values, net))


def test_alternation_needs_nothing():
    acts = _actions([1, -1, 1, -1, 1])
    assert all(a.action == "keep" for a in acts)
    assert all(d.repaints == [] for d in decide_repaints([1, -1, 1, -1, 1], default_net()))


def test_middle_block_painted_white():
    acts = _actions([1, -1, 0, -1, 1])
    assert [(a.block_index, a.action, a.color) for a in acts if a.action != "keep"] == [(3, "repaint", "white")]


def test_leading_partial_triple():
    (d,) = decide_repaints([0, -1, 1], default_net())
    assert d.repaints == [(1, "white")]
    assert _actions([0, -1, 1])[0].action == "repaint"


def test_non_convergent_window_flagged_not_painted():
    (d,) = decide_repaints([1, 0, -1], default_net())
    assert d.flagged and d.repaints == []
    assert all(a.action == "review" for a in _actions([1, 0, -1]))


def test_too_few_segments():
    with pytest.raises(ValueError):
        decide_repaints([1, -1], default_net())


@given(st.lists(st.sampled_from((-1, 0, 1)), min_size=3, max_size=9))
def test_memory_windows_have_no_repaints(values):
    for d in decide_repaints(values, default_net()):
        if d.input in default_net().memories:
            assert d.repaints == [] and d.result.sweeps == 1


# ------------------------------------------------------------- synthetic

def test_no_erasure_no_truth_repaints():
    imgs = generate_synthetic(CorpusSpec(count=20, erasure_rate=0.0))
    assert all(r[2] == "keep" for im in imgs for r in im.ground_truth())


def test_corpus_deterministic():
    a = generate_synthetic(CorpusSpec(count=10, seed=9))
    b = generate_synthetic(CorpusSpec(count=10, seed=9))
    assert all(np.array_equal(x.pixels, y.pixels) and x.erased == y.erased for x, y in zip(a, b))


def test_erasure_rate_binomial():
    imgs = generate_synthetic(CorpusSpec(count=100, erasure_rate=0.2, seed=4))
    n = sum(len(im.colors) for im in imgs)
    k = sum(len(im.erased) for im in imgs)
    sd = (n * 0.2 * 0.8) ** 0.5
    assert abs(k - 0.2 * n) <= 4 * sd


def test_write_corpus(tmp_path):
    imgs = generate_synthetic(CorpusSpec(count=3, seed=2))
    write_corpus(imgs, tmp_path)
    assert np.array_equal(read_pgm(tmp_path / imgs[0].name), imgs[0].pixels)
    rows = read_rows(tmp_path / "ground_truth.csv")
    assert rows == [r for im in imgs for r in im.ground_truth()]


@pytest.mark.parametrize("data", [{"count": -1}, {"erasure_rate": 1.5}, {"width": 30},
                                  {"stripes": 3}, {"noise_std": -0.1}])
def test_bad_corpus_specs(data):
    with pytest.raises(CorpusConfigError):
        corpus_spec_from_dict(data)


# ---------------------------------------------------------------- pipeline

def test_inspection_deterministic():
    im = generate_synthetic(CorpusSpec(count=1, seed=21))[0]
    a = decision_rows(im.name, inspect_image(im.pixels))
    b = decision_rows(im.name, inspect_image(im.pixels))
    assert a == b


@pytest.mark.parametrize("filt", ["mexican-hat", "gabor-pca"])
def test_small_corpus_scores(filt):
    imgs = generate_synthetic(CorpusSpec(count=15, seed=8))
    score, _ = evaluate_corpus(imgs, InspectionConfig(filter=filt))
    assert score.precision >= 0.9 and score.recall >= 0.9


def test_score_rows_needs_colour():
    truth = [("a", 1, "repaint", "white"), ("a", 2, "keep", "black")]
    pred = [("a", 1, "repaint", "black"), ("a", 2, "repaint", "black")]
    assert score_rows(pred, truth) == (0, 2, 1)


def test_unknown_filter():
    with pytest.raises(ValueError):
        InspectionConfig(filter="sobel")
