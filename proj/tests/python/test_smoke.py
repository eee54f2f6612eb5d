import json

import pytest

import disfl


def write_manifest(path, rows):
    with open(path, "w", encoding="utf-8") as f:
        for uid, spk, dur, text in rows:
            f.write(json.dumps({"utterance_id": uid, "speaker_id": spk, "audio_ref": uid + ".wav",
                                "duration_sec": dur, "transcript": text}) + "\n")


def test_parse_and_filter():
    t = disfl.parse_transcript("alarm on tw- on twelve")
    assert [tok.kind for tok in t.tokens][2] == disfl.TokenKind.PartialWord
    v = disfl.apply_filter(t)
    assert v.accepted
    assert set(v.matched) == {disfl.Condition.HasPartialWithCompletion, disfl.Condition.HasRepetition}
    assert disfl.has_partial_with_completion(t) == (2, 4)


def test_parse_error_is_value_error():
    with pytest.raises(ValueError):
        disfl.parse_transcript("a <b")


def test_strategies_round_trip():
    t = disfl.parse_transcript("uh p- play music")
    want = disfl.normalize_reference(t)
    assert want == ["play", "music"]
    for kind in (disfl.StrategyKind.Delete, disfl.StrategyKind.ReplaceWithTag,
                 disfl.StrategyKind.AppendTag, disfl.StrategyKind.FirstLetterTag):
        s = disfl.PartialWordStrategy(kind)
        rendered = disfl.render_transcript(disfl.transform(t, s))
        assert disfl.postprocess(rendered, s) == want
    assert disfl.render_transcript(disfl.transform(t, disfl.PartialWordStrategy(disfl.StrategyKind.AppendTag))) \
        == "<uh> p<pw> play music"


def test_segment():
    v = disfl.WordpieceVocab()
    v.entries = {"a": -1.0, "b": -1.0, "ab": -1.5}
    seg = disfl.segment("ab", v)
    assert seg.pieces == ["ab"]
    assert seg.score == pytest.approx(-1.5)


def test_scoring():
    r = disfl.score_pair("a b c".split(), "a x c d".split())
    assert r.err_total == 2
    assert r.wer == pytest.approx(2 / 3)
    assert r.s_share == pytest.approx(50.0)
    assert r.d_share == pytest.approx(0.0)
    ops, counts = disfl.align(["a"], [])
    assert ops == [("del", "a", "")]
    assert counts.del_ == 1
    nwer, werr = disfl.relative_metrics(2.34, 3.02, 1.0)
    assert round(werr, 1) == 22.5


def test_manifest_split_and_mix(tmp_path):
    write_manifest(tmp_path / "ord.manifest",
                   [(f"o{i}", f"s{i % 7}", 10.0, "play music") for i in range(50)])
    write_manifest(tmp_path / "dis.manifest",
                   [(f"d{i}", f"t{i % 3}", 2.0, "p- play") for i in range(20)])
    ordinary = disfl.read_manifest(str(tmp_path / "ord.manifest"))
    dis = disfl.read_manifest(str(tmp_path / "dis.manifest"))
    assert len(ordinary) == 50

    train, dev, test = disfl.speaker_disjoint_split(ordinary, 0.6, 0.2, 0.2, 3)
    assert len(train) + len(dev) + len(test) == 50
    speakers = [{r.speaker_id for r in part.records} for part in (train, dev, test)]
    assert not (speakers[0] & speakers[1] or speakers[0] & speakers[2] or speakers[1] & speakers[2])

    quarter = {r.utterance_id for r in disfl.take_fraction(dis, 0.25, 9).records}
    half = {r.utterance_id for r in disfl.take_fraction(dis, 0.5, 9).records}
    assert len(quarter) == 5 and quarter <= half

    mixed, report = disfl.build_mix(ordinary, dis, 0.5, 9,
                                    disfl.PartialWordStrategy(disfl.StrategyKind.ReplaceWithTag))
    assert len(mixed) == 60
    assert report.disfluent_sec == pytest.approx(20.0)
    assert mixed.records[-1].transcript.raw == "<pw> play"
    disfl.write_manifest(mixed, str(tmp_path / "mix.manifest"))
    assert len(disfl.read_manifest(str(tmp_path / "mix.manifest"))) == 60


def test_version():
    assert disfl.__version__
