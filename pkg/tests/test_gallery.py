import numpy as np
import pytest

from maya.errors import GalleryError
from maya.gallery import IdentityGallery


def unit(seed, dim=48):
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(dim)
    return v / np.linalg.norm(v)


class TestEnroll:
    def test_enroll_then_identify_same(self):
        g = IdentityGallery()
        e = unit(1)
        pid = g.enroll("Ava", e)
        match = g.identify(e)
        assert match is not None
        assert match.person_id == pid
        assert match.similarity == pytest.approx(1.0, abs=1e-6)

    def test_distinct_person_ids(self):
        g = IdentityGallery()
        assert g.enroll("a", unit(1)) != g.enroll("b", unit(2))

    def test_negated_embedding_no_match(self):
        g = IdentityGallery()
        e = unit(3)
        g.enroll("a", e)
        assert g.identify(-e) is None

    def test_non_normalized_rejected(self):
        g = IdentityGallery()
        with pytest.raises(GalleryError):
            g.enroll("a", np.ones(48))
        g.enroll("a", unit(4))
        with pytest.raises(GalleryError):
            g.identify(np.full(48, 0.5))

    def test_add_embedding_accumulates(self):
        g = IdentityGallery()
        pid = g.enroll("a", unit(5))
        g.add_embedding(pid, unit(6))
        assert len(g.entries[0].embeddings) == 2
        with pytest.raises(GalleryError):
            g.add_embedding("p9999", unit(7))


class TestIdentify:
    def test_empty_gallery(self):
        assert IdentityGallery().identify(unit(1)) is None

    def test_picks_best_of_two(self):
        g = IdentityGallery(threshold=0.0)
        e1, e2 = unit(10), unit(11)
        g.enroll("one", e1)
        pid2 = g.enroll("two", e2)
        assert g.identify(e2).person_id == pid2

    def test_matches_brute_force_argmax(self):
        rng = np.random.default_rng(42)
        g = IdentityGallery(threshold=-1.0)
        embeddings = []
        for i in range(20):
            e = unit(100 + i)
            pid = g.enroll(f"p{i}", e)
            embeddings.append((pid, e))
        for q in range(30):
            query = unit(500 + q)
            best_pid, best_sim = max(
                ((pid, float(e @ query)) for pid, e in embeddings), key=lambda t: t[1]
            )
            match = g.identify(query)
            assert match.person_id == best_pid
            assert match.similarity == pytest.approx(best_sim, abs=1e-12)

    def test_threshold_sweep_monotone(self):
        queries = [unit(700 + i) for i in range(25)]
        g = IdentityGallery()
        for i in range(8):
            g.enroll(f"p{i}", unit(800 + i))
        prev = None
        for threshold in np.linspace(-1.0, 1.0, 21):
            g.threshold = float(threshold)
            matches = sum(1 for q in queries if g.identify(q) is not None)
            if prev is not None:
                assert matches <= prev
            prev = matches

    def test_tie_breaks_to_lowest_person_id(self):
        g = IdentityGallery(threshold=0.0)
        e = unit(900)
        first = g.enroll("a", e)
        g.enroll("b", e.copy())
        assert g.identify(e).person_id == first


class TestPersistence:
    def test_json_roundtrip(self, tmp_path):
        g = IdentityGallery(threshold=0.75)
        pid = g.enroll("Ava", unit(1))
        g.add_embedding(pid, unit(2))
        g.enroll("Ben", unit(3))
        path = tmp_path / "gallery.json"
        g.save(path)
        loaded = IdentityGallery.load(path)
        assert loaded.threshold == 0.75
        assert [e.person_id for e in loaded.entries] == [e.person_id for e in g.entries]
        assert loaded.identify(unit(3)).display_name == "Ben"
        # fresh enrollments continue the id sequence
        assert loaded.enroll("Cal", unit(4)) == "p0003"
