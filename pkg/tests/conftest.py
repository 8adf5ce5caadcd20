import json
import shutil
from pathlib import Path

import numpy as np
import pytest

from statuary.manifest import write_manifest
from statuary.metadata import Gazetteer
from statuary.model import (
    ArchiveImage,
    FaceRegion,
    MetadataRecord,
    StatueRecord,
    VectorStore,
    l2_normalize,
)
from statuary.vecf import write_vector_store

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def gazetteer() -> Gazetteer:
    return Gazetteer.from_file(FIXTURES / "gazetteer.tsv")


@pytest.fixture(scope="session")
def path_fixture() -> list[dict]:
    return json.loads((FIXTURES / "paths_expected.json").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def chain_cases() -> list[dict]:
    return json.loads((FIXTURES / "chain_cases.json").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def tfidf_fixture() -> dict:
    return json.loads((FIXTURES / "tfidf_corpus.json").read_text(encoding="utf-8"))


def separated_unit_vectors(n: int, dim: int, max_cos: float, rng: np.random.Generator,
                           max_tries: int = 100_000) -> np.ndarray:
    """Random unit vectors with all pairwise cosines <= max_cos (rejection)."""
    out = np.zeros((n, dim))
    count = 0
    tries = 0
    while count < n:
        tries += 1
        if tries > max_tries:
            raise RuntimeError("could not place separated centers")
        v = rng.normal(size=dim)
        v /= np.linalg.norm(v)
        if count == 0 or np.max(out[:count] @ v) <= max_cos:
            out[count] = v
            count += 1
    return out


def perturb_on_sphere(center: np.ndarray, cos_target: float,
                      rng: np.random.Generator) -> np.ndarray:
    """Unit vector at exactly the given cosine from a unit center."""
    r = rng.normal(size=center.shape[0])
    r -= (r @ center) * center
    r /= np.linalg.norm(r)
    sin = float(np.sqrt(1.0 - cos_target ** 2))
    v = cos_target * center + sin * r
    return v / np.linalg.norm(v)


def make_fixture_archive(dim: int = 8, seed: int = 1234):
    """A small consistent archive: 4 statues, 8 images, global + face stores."""
    rng = np.random.default_rng(seed)
    centers = separated_unit_vectors(4, dim, 0.3, rng)
    spec = [
        ("statue:amida1", MetadataRecord(statue_type="Amida", era="Heian",
                                         city_taken="Kyoto", country_taken="Japan"),
         ["Japan/Kyoto/amida_1.jpg", "Japan/Kyoto/amida_2.jpg", "Japan/Kyoto/amida_3.jpg"],
         1),
        ("statue:kannon1", MetadataRecord(statue_type="Kannon", era="Kamakura",
                                          country_taken="Japan"),
         ["Japan/kannon_a.jpg", "Japan/kannon_b.jpg"], 1),
        ("statue:daibutsu1", MetadataRecord(statue_type="Daibutsu", city_taken="Nara",
                                            temple="Todaiji", country_taken="Japan"),
         ["Japan/Nara/Todaiji/daibutsu_1.jpg", "Japan/Nara/Todaiji/daibutsu_2.jpg"], 2),
        ("statue:plain1", MetadataRecord(), ["misc/unknown_statue.jpg"], 0),
    ]
    images, statues = [], []
    g_rows, g_ids, f_rows, f_ids = [], [], [], []
    for s_idx, (sid, meta, paths, n_faces) in enumerate(spec):
        image_ids = []
        for p_idx, path in enumerate(paths):
            iid = f"img:{sid.split(':')[1]}:{p_idx}"
            image_ids.append(iid)
            g_ids.append(iid)
            g_rows.append(perturb_on_sphere(centers[s_idx], 0.93, rng))
            regions = []
            if p_idx < n_faces:
                fid = f"face:{sid.split(':')[1]}:{p_idx}"
                f_ids.append(fid)
                f_rows.append(perturb_on_sphere(centers[s_idx], 0.95, rng))
                regions.append(FaceRegion(fid, iid, (10, 10, 60, 60),
                                          face_row=len(f_rows) - 1))
            images.append(ArchiveImage(
                id=iid, path=path, folder_id=str(Path(path).parent),
                timestamp=1_500_000_000 + 100 * len(images),
                global_row=len(g_rows) - 1, face_regions=regions, statue_id=sid))
        statues.append(StatueRecord(sid, image_ids, meta))
    stores = {
        "global": VectorStore("global", dim, np.stack(g_rows).astype(np.float32), g_ids),
        "face": VectorStore("face", dim, np.stack(f_rows).astype(np.float32), f_ids),
    }
    return images, statues, stores


def write_fixture_archive(root: Path, dim: int = 8, seed: int = 1234):
    """Materialize the fixture archive on disk in the standard layout."""
    images, statues, stores = make_fixture_archive(dim=dim, seed=seed)
    root.mkdir(parents=True, exist_ok=True)
    write_manifest(root / "manifest.jsonl", images, statues)
    write_vector_store(stores["global"], root / "global.vecf")
    write_vector_store(stores["face"], root / "face.vecf")
    shutil.copy(FIXTURES / "gazetteer.tsv", root / "gazetteer.tsv")
    return images, statues, stores


@pytest.fixture()
def archive_dir(tmp_path):
    root = tmp_path / "archive"
    write_fixture_archive(root)
    return root
