import numpy as np

from statuary.model import ArchiveImage, FaceRegion, MetadataRecord, StatueRecord, VectorStore
from statuary.validate import validate_archive


def make_archive():
    matrix = np.eye(3, dtype=np.float32)
    store = VectorStore("global", 3, matrix, ["i1", "i2", "i3"])
    face_store = VectorStore("face", 3, matrix[:1], ["f1"])
    images = [
        ArchiveImage(id="i1", path="a/i1.jpg", folder_id="a", global_row=0,
                     face_regions=[FaceRegion("f1", "i1", (0, 0, 10, 10), face_row=0)]),
        ArchiveImage(id="i2", path="a/i2.jpg", folder_id="a", global_row=1),
        ArchiveImage(id="i3", path="b/i3.jpg", folder_id="b", global_row=2),
    ]
    statues = [
        StatueRecord("s1", ["i1", "i2"], MetadataRecord(era="Heian")),
        StatueRecord("s2", ["i3"]),
    ]
    return images, statues, {"global": store, "face": face_store}


def test_consistent_archive_empty_report():
    images, statues, stores = make_archive()
    assert validate_archive(images, statues, stores).ok


def test_dangling_global_row():
    images, statues, stores = make_archive()
    images[1].global_row = 5
    report = validate_archive(images, statues, stores)
    assert len(report.by_code("dangling-row")) == 1


def test_partition_violation():
    images, statues, stores = make_archive()
    statues[1].image_ids.append("i1")  # i1 already in s1
    report = validate_archive(images, statues, stores)
    assert len(report.by_code("partition-violation")) == 1


def test_duplicate_image_id():
    images, statues, stores = make_archive()
    images.append(ArchiveImage(id="i1", path="x", folder_id="x"))
    report = validate_archive(images, statues, stores)
    assert report.by_code("duplicate-image-id")


def test_unknown_image_reference():
    images, statues, stores = make_archive()
    statues[0].image_ids.append("ghost")
    report = validate_archive(images, statues, stores)
    assert report.by_code("unknown-image")


def test_non_unit_row_reported():
    images, statues, stores = make_archive()
    bad = stores["global"].matrix.copy()
    bad[0] *= 2
    stores["global"] = VectorStore("global", 3, bad, stores["global"].row_ids)
    report = validate_archive(images, statues, stores)
    assert report.by_code("non-unit-row")


def test_canonical_image_must_be_member():
    images, statues, stores = make_archive()
    statues[0].canonical_image = "i3"
    report = validate_archive(images, statues, stores)
    assert report.by_code("bad-canonical")
