"""Tests for branch windows, the labeled dataset, encoding and the classifiers."""

import numpy as np
import pandas as pd
import pytest

from drndalo.config import ObfKey, feature_names, feature_width
from drndalo.config.feature_config import SLOT_WIDTH
from drndalo.errors import DatasetError
from drndalo.isa import Opcode, parse_asm
from drndalo.obfuscation import Mix64Hash, compute_mask
from drndalo.stealth import (
    BbblDataset,
    BbblSample,
    ClassifierReport,
    DecisionTree,
    LogisticRegression,
    RandomForest,
    WindowRecord,
    basic_blocks,
    branch_windows,
    build_dataset,
    confusion_matrix,
    encode,
    find_leaders,
    gain_captured,
    make_classifier,
    preprocess,
    relabel,
    split_programs,
    train_and_evaluate,
    window_sweep,
)
from drndalo.stealth.dataset import NO_REGISTER
from drndalo.stealth.preprocessing import EncodedSet

from conftest import TEST_KEY_HEX

BLOCKS_SOURCE = (
    ".entry main\n"
    "main:\n"
    "    addi t0, zero, 4\n"        # 0x00
    "    addi t1, zero, 0\n"        # 0x04
    "loop:\n"
    "    add t1, t1, t0\n"          # 0x08
    "    addi t0, t0, -1\n"         # 0x0c
    "    blt zero, t0, loop\n"      # 0x10
    "    beq t1, zero, end\n"       # 0x14
    "    addi a0, t1, 0\n"          # 0x18
    "end:\n"
    "    addi a7, zero, 93\n"       # 0x1c
    "    ecall\n"                   # 0x20
)


def _encoded(X, y, window=1) -> EncodedSet:
    return EncodedSet(X=X, y=y, program_ids=['p'] * len(y), window=window)


# ---------------------------------------------------------------------------
# Blocks and windows
# ---------------------------------------------------------------------------

def test_leaders_and_blocks():
    program = parse_asm(BLOCKS_SOURCE)
    assert find_leaders(program) == [0x00, 0x08, 0x14, 0x18, 0x1c]
    blocks = basic_blocks(program)
    assert [b.start for b in blocks] == [0x00, 0x08, 0x14, 0x18, 0x1c]
    assert sum(len(b.instructions) for b in blocks) == len(program)
    assert [b.is_branching for b in blocks] == [False, True, True, False, False]


def test_windows_stay_inside_the_block():
    program = parse_asm(BLOCKS_SOURCE)
    windows = branch_windows(program, 8)
    assert set(windows) == {0x10, 0x14}
    assert [i.address for i in windows[0x10]] == [0x08, 0x0c, 0x10]
    assert [i.address for i in windows[0x14]] == [0x14]
    assert [i.address for i in branch_windows(program, 2)[0x10]] == [0x0c, 0x10]
    with pytest.raises(ValueError):
        branch_windows(program, 0)


def test_window_records_mark_missing_operands():
    program = parse_asm(BLOCKS_SOURCE)
    branch = WindowRecord.of(program.fetch(0x10))
    assert branch == WindowRecord(Opcode.BLT, 0, 5, NO_REGISTER)
    addi = WindowRecord.of(program.fetch(0x0c))
    assert addi == WindowRecord(Opcode.ADDI, 5, NO_REGISTER, 5)
    assert WindowRecord.from_text(addi.to_text()) == addi


# ---------------------------------------------------------------------------
# Dataset
# ---------------------------------------------------------------------------

@pytest.fixture(scope='module')
def small_dataset(corpus):
    return build_dataset(corpus, ObfKey.from_hex(TEST_KEY_HEX), Mix64Hash(), window=4)


def test_dataset_labels_follow_the_mask(corpus, small_dataset):
    key = ObfKey.from_hex(TEST_KEY_HEX)
    assert small_dataset.program_ids == sorted(corpus)
    for pid, program in corpus.items():
        samples = [s for s in small_dataset if s.program_id == pid]
        n = len(branch_windows(program, 1))
        assert len(samples) == 2 * n
        mask = compute_mask(program, Mix64Hash(), key)
        obfuscated, plain = samples[:n], samples[n:]
        assert [s.label for s in obfuscated] == [mask.bit(s.branch_address) for s in obfuscated]
        assert all(s.label == 0 for s in plain)
        for s in samples:
            assert 1 <= len(s.window) <= 4
            assert s.br_up == int(program.fetch(s.branch_address).target_address < s.branch_address)


def test_dataset_line_export_round_trip(tmp_path, small_dataset):
    path = tmp_path / 'bbbl.txt'
    small_dataset.save_lines(path)
    first = path.read_text().splitlines()[0]
    assert ',window:[' in first
    loaded = BbblDataset.load_lines(path)
    assert loaded.samples == small_dataset.samples
    assert loaded.window == 4


def test_sample_line_format():
    sample = BbblSample(
        program_id='p1',
        branch_address=0x40,
        window=(WindowRecord(Opcode.ADDI, 5, NO_REGISTER, 5), WindowRecord(Opcode.BNE, 5, 0, NO_REGISTER)),
        br_up=1,
        label=1,
    )
    assert sample.to_line() == "p1,0x00000040,1,1,window:[addi;5;-1;5|bne;5;0;-1]"
    assert BbblSample.from_line(sample.to_line()) == sample


def test_sample_window_must_end_in_branch():
    with pytest.raises(ValueError, match="does not end in a branch"):
        BbblSample('p', 0, (WindowRecord(Opcode.ADDI, 0, NO_REGISTER, 5),), 0, 0)


def test_dataset_parquet_export(tmp_path, small_dataset):
    path = tmp_path / 'bbbl.parquet'
    small_dataset.to_parquet(path)
    frame = pd.read_parquet(path)
    assert len(frame) == len(small_dataset)
    assert set(frame['label']) <= {0, 1}
    assert set(frame['branch_opcode']) <= {'beq', 'bne', 'blt', 'bge', 'bltu', 'bgeu'}


def test_truncation_keeps_the_newest_records(small_dataset):
    short = small_dataset.truncated(1)
    assert short.window == 1
    for long, cut in zip(small_dataset, short):
        assert cut.window == long.window[-1:]
    with pytest.raises(ValueError, match="cannot widen"):
        short.truncated(2)


def test_too_few_programs(corpus, key):
    few = {pid: corpus[pid] for pid in ('sum10', 'fib', 'gcd')}
    with pytest.raises(DatasetError, match="at least 4"):
        build_dataset(few, key, Mix64Hash(), window=1)


def test_relabel_is_seeded(small_dataset):
    a = [s.label for s in relabel(small_dataset, seed=1)]
    b = [s.label for s in relabel(small_dataset, seed=1)]
    assert a == b
    assert set(a) == {0, 1}


# ---------------------------------------------------------------------------
# Encoding and split
# ---------------------------------------------------------------------------

def test_one_hot_layout(small_dataset):
    window = 4
    X = encode(small_dataset.samples, window)
    assert X.shape == (len(small_dataset), feature_width(window))
    assert len(feature_names(window)) == feature_width(window)
    # op, rs1, rs2 and rd are each one-hot in every slot
    assert (X[:, :-1].reshape(len(X), window, SLOT_WIDTH).sum(axis=2) == 4).all()
    assert X[:, -1].tolist() == [s.br_up for s in small_dataset]


def test_short_windows_are_padded_as_absent():
    sample = BbblSample('p', 0, (WindowRecord(Opcode.BEQ, 1, 2, NO_REGISTER),), 0, 0)
    X = encode([sample], 2)
    names = feature_names(2)
    on = {names[i] for i in np.flatnonzero(X[0])}
    assert on == {
        'op0_beq', 'rs1_0_x1', 'rs2_0_x2', 'rd_0_absent',
        'op1_absent', 'rs1_1_absent', 'rs2_1_absent', 'rd_1_absent',
    }


def test_split_is_deterministic_and_disjoint():
    ids = [f"prog{i:02d}" for i in range(40)]
    train, test = split_programs(ids, 0.75, seed=5)
    assert (train, test) == split_programs(list(reversed(ids)), 0.75, seed=5)
    assert not set(train) & set(test)
    assert sorted(train + test) == ids
    assert len(train) == 30
    assert split_programs(ids, 0.75, seed=6) != (train, test)


def test_split_validation():
    with pytest.raises(ValueError):
        split_programs(['a', 'b'], 1.0)
    with pytest.raises(ValueError):
        split_programs(['a'], 0.5)


def test_preprocess_splits_by_program(small_dataset):
    train, test = preprocess(small_dataset, split_seed=0, window=2)
    assert not set(train.programs) & set(test.programs)
    assert train.X.shape[1] == feature_width(2)
    assert set(train.y.tolist()) == {0, 1}
    counts = small_dataset.class_counts()
    assert len(train) + len(test) < counts[0] + counts[1]


def test_preprocess_needs_both_classes(small_dataset):
    all_plain = small_dataset.with_labels([0] * len(small_dataset))
    with pytest.raises(DatasetError, match="lacks class"):
        preprocess(all_plain)


# ---------------------------------------------------------------------------
# Classifiers
# ---------------------------------------------------------------------------

@pytest.fixture(scope='module')
def separable():
    rng = np.random.default_rng(0)
    X = rng.integers(0, 2, size=(600, 20), dtype=np.uint8)
    y = X[:, 3].copy()
    return _encoded(X[:400], y[:400]), _encoded(X[400:], y[400:])


@pytest.mark.parametrize('model', ['logreg', 'tree'])
def test_separable_data_is_learned(separable, model):
    train, test = separable
    report = train_and_evaluate(train, test, model)
    assert report.accuracy >= 0.99
    assert report.test_samples == 200


def test_forest_on_separable_data(separable):
    train, test = separable
    forest = RandomForest(n_trees=15, seed=1).fit(train.X, train.y)
    assert np.mean(forest.predict(test.X) == test.y) >= 0.9


def test_tree_respects_depth_limit(separable):
    train, _ = separable
    tree = DecisionTree(max_depth=2).fit(train.X, train.y)
    assert tree.depth() <= 2


def test_logreg_reports_convergence():
    X = np.array([[0], [1]] * 20, dtype=np.uint8)
    y = X[:, 0].copy()
    model = LogisticRegression(max_epochs=3).fit(X, y)
    assert not model.converged
    assert model.epochs == 3


def test_unfitted_models_refuse_to_predict():
    with pytest.raises(RuntimeError):
        LogisticRegression().predict(np.zeros((1, 2)))
    with pytest.raises(ValueError, match="Available"):
        make_classifier('svm')


def test_confusion_matrix():
    assert confusion_matrix([0, 0, 1, 1, 1], [0, 1, 1, 1, 0]) == [[1, 1], [1, 2]]


def test_train_and_evaluate_needs_both_classes(separable):
    train, test = separable
    single = _encoded(train.X, np.zeros_like(train.y))
    with pytest.raises(DatasetError):
        train_and_evaluate(single, test)


def test_gain_captured():
    def report(accuracy):
        return ClassifierReport(model='logreg', accuracy=accuracy, confusion=[[0, 0], [0, 0]],
                                window=1, train_programs=1, test_programs=1)
    assert gain_captured([report(0.8), report(0.875)]) == pytest.approx(0.8)
    assert gain_captured([report(0.5), report(0.49)]) == 1.0


# ---------------------------------------------------------------------------
# End-to-end stealth measurements
# ---------------------------------------------------------------------------

@pytest.fixture(scope='module')
def synthetic_dataset(synthetic_corpus):
    return build_dataset(synthetic_corpus, ObfKey.from_hex(TEST_KEY_HEX), Mix64Hash(), window=1)


@pytest.fixture(scope='module')
def random_label_split(synthetic_dataset):
    return preprocess(relabel(synthetic_dataset, seed=3), split_seed=0)


def test_plain_branches_outnumber_inverted_three_to_one(synthetic_dataset):
    counts = synthetic_dataset.class_counts()
    assert 2.5 <= counts[0] / counts[1] <= 4.0


def test_training_classes_are_balanced_after_subsampling(synthetic_dataset):
    train, test = preprocess(synthetic_dataset, split_seed=0)
    train_ratio = np.sum(train.y == 0) / np.sum(train.y == 1)
    test_ratio = np.sum(test.y == 0) / np.sum(test.y == 1)
    assert 0.75 <= train_ratio <= 1.33
    assert 2.5 <= test_ratio <= 4.0


@pytest.mark.parametrize('model', ['logreg', 'tree'])
def test_random_labels_carry_no_signal(random_label_split, model):
    train, test = random_label_split
    assert len(test) >= 2000
    report = train_and_evaluate(train, test, model)
    assert 0.45 <= report.accuracy <= 0.55


def test_skewed_branch_mix_leaks_through_the_opcode(synthetic_corpus, key):
    reports = window_sweep(synthetic_corpus, key, Mix64Hash(), windows=(1, 4), model='logreg')
    assert [r.window for r in reports] == [1, 4]
    assert reports[0].accuracy > 0.55
    assert gain_captured(reports) >= 0.8
    assert all(r.test_programs + r.train_programs == len(synthetic_corpus) for r in reports)
