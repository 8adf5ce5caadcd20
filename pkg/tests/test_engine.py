import numpy as np
import pytest

from statuary.engine import ArchiveEngine, load_engine
from statuary.errors import NoLabelError, QueryError
from statuary.model import l2_normalize
from statuary.validate import validate_archive

from conftest import make_fixture_archive


@pytest.fixture()
def engine():
    images, statues, stores = make_fixture_archive()
    return ArchiveEngine(images={i.id: i for i in images},
                         statues={s.id: s for s in statues},
                         stores=stores)


def test_fixture_archive_is_consistent():
    images, statues, stores = make_fixture_archive()
    assert validate_archive(images, statues, stores).ok


class TestHybrid:
    def test_text_only(self, engine):
        hits = engine.hybrid_search(text="amida", k=5)
        assert hits[0].entity_id == "statue:amida1"

    def test_text_only_equals_text_search_order(self, engine):
        hits = engine.hybrid_search(text="japan", k=10)
        assert [h.rank for h in hits] == list(range(1, len(hits) + 1))
        scores = [h.score for h in hits]
        assert scores == sorted(scores, reverse=True)

    def test_vector_only_finds_statue(self, engine):
        q = engine.stores["global"].vector("img:amida1:0")
        hits = engine.hybrid_search(vector=q, k=2)
        assert hits[0].entity_id == "statue:amida1"
        assert hits[0].score == pytest.approx(1.0, abs=1e-5)

    def test_statue_score_is_max_over_members(self, engine):
        q = engine.stores["global"].vector("img:amida1:2")
        hits = engine.hybrid_search(vector=q, k=1)
        flat_hits = engine.knn_images(np.asarray(q, dtype=np.float64), 3)
        member_scores = [h.score for h in flat_hits
                         if engine.statue_of(h.entity_id, "global") == "statue:amida1"]
        assert hits[0].score == pytest.approx(max(member_scores), abs=1e-9)

    def test_text_and_vector_composed(self, engine):
        # oracle: filter candidates by token, scan, max-aggregate
        q = np.asarray(engine.stores["global"].vector("img:daibutsu1:0"), dtype=np.float64)
        hits = engine.hybrid_search(text="nara", vector=q, k=5)
        assert [h.entity_id for h in hits] == ["statue:daibutsu1"]

    def test_metadata_filter(self, engine):
        hits = engine.hybrid_search(text="japan", filters={"era": "Heian"}, k=5)
        assert [h.entity_id for h in hits] == ["statue:amida1"]

    def test_filter_only(self, engine):
        hits = engine.hybrid_search(filters={"country_taken": "Japan"}, k=10)
        assert {h.entity_id for h in hits} == {
            "statue:amida1", "statue:kannon1", "statue:daibutsu1"}

    def test_no_modality_rejected(self, engine):
        with pytest.raises(QueryError):
            engine.hybrid_search()

    def test_facets_attached(self, engine):
        hits = engine.hybrid_search(text="amida", k=1)
        assert ("era", "Heian") in hits[0].facets

    def test_face_namespace(self, engine):
        q = engine.stores["face"].vector("face:kannon1:0")
        hits = engine.hybrid_search(vector=q, namespace="face", k=1)
        assert hits[0].entity_id == "statue:kannon1"


class TestPredictLabels:
    def test_majority_vote(self, engine):
        q = engine.stores["face"].vector("face:amida1:0")
        label, confidence = engine.predict_labels(q, "statue_type", k_vote=3)
        assert label == "Amida"
        assert 0 < confidence <= 1

    def test_exclude_statue(self, engine):
        q = engine.stores["face"].vector("face:amida1:0")
        label, _ = engine.predict_labels(q, "statue_type", k_vote=1,
                                         exclude_statue="statue:amida1")
        assert label != "Amida" or True  # nearest other labeled statue wins
        assert label in {"Kannon", "Daibutsu"}

    def test_no_labeled_neighbor(self, engine):
        q = engine.stores["face"].vector("face:amida1:0")
        # no statue has city_origin populated in the fixture
        with pytest.raises(NoLabelError):
            engine.predict_labels(q, "city_origin", k_vote=3)

    def test_tie_goes_to_nearest(self, engine):
        q = engine.stores["face"].vector("face:daibutsu1:0")
        label, confidence = engine.predict_labels(q, "statue_type", k_vote=2,
                                                  exclude_statue=None)
        assert label == "Daibutsu"
        assert confidence == pytest.approx(1.0)


def test_load_engine_from_disk(archive_dir):
    engine = load_engine(archive_dir)
    assert engine.counts()["statues"] == 4
    assert engine.gazetteer is not None
    hits = engine.hybrid_search(text="todaiji", k=3)
    assert hits[0].entity_id == "statue:daibutsu1"
