"""Identity gallery over unit-norm embeddings, matched by cosine similarity.

Recognizing a returning child across sessions only needs nearest-neighbor
search over a handful of enrolled embeddings, so matching is a brute-force
argmax over all stored vectors with a similarity threshold.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import GalleryError

DEFAULT_THRESHOLD = 0.80
NORM_TOLERANCE = 1e-6


@dataclass
class GalleryEntry:
    person_id: str
    display_name: str
    embeddings: list[np.ndarray] = field(default_factory=list)


@dataclass(frozen=True)
class Match:
    person_id: str
    display_name: str
    similarity: float


def _check_embedding(embedding: np.ndarray) -> np.ndarray:
    emb = np.asarray(embedding, dtype=np.float64).ravel()
    norm = float(np.linalg.norm(emb))
    if abs(norm - 1.0) > NORM_TOLERANCE:
        raise GalleryError(f"embedding must be unit-norm, got |e| = {norm:.6f}")
    return emb


class IdentityGallery:
    """Mutable store of enrolled people; single-writer, read-concurrent."""

    def __init__(self, threshold: float = DEFAULT_THRESHOLD):
        if not -1.0 <= threshold <= 1.0:
            raise GalleryError(f"threshold must be in [-1, 1], got {threshold}")
        self.threshold = threshold
        self.entries: list[GalleryEntry] = []
        self._next_id = 1

    def enroll(self, display_name: str, embedding: np.ndarray) -> str:
        emb = _check_embedding(embedding)
        person_id = f"p{self._next_id:04d}"
        self._next_id += 1
        self.entries.append(GalleryEntry(person_id, display_name, [emb]))
        return person_id

    def add_embedding(self, person_id: str, embedding: np.ndarray) -> None:
        emb = _check_embedding(embedding)
        for entry in self.entries:
            if entry.person_id == person_id:
                entry.embeddings.append(emb)
                return
        raise GalleryError(f"unknown person_id {person_id!r}")

    def identify(self, embedding: np.ndarray) -> Optional[Match]:
        """Best cosine match at or above the threshold; ties go to the lowest id."""
        emb = _check_embedding(embedding)
        best: Optional[Match] = None
        for entry in sorted(self.entries, key=lambda e: e.person_id):
            for stored in entry.embeddings:
                sim = float(np.dot(stored, emb))
                if sim >= self.threshold and (best is None or sim > best.similarity):
                    best = Match(entry.person_id, entry.display_name, sim)
        return best

    def to_json(self) -> str:
        doc = {
            "v": 1,
            "threshold": self.threshold,
            "entries": [
                {
                    "person_id": e.person_id,
                    "name": e.display_name,
                    "embeddings": [emb.tolist() for emb in e.embeddings],
                }
                for e in self.entries
            ],
        }
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "IdentityGallery":
        doc = json.loads(text)
        gallery = cls(threshold=doc.get("threshold", DEFAULT_THRESHOLD))
        max_num = 0
        for item in doc.get("entries", []):
            entry = GalleryEntry(
                person_id=item["person_id"],
                display_name=item["name"],
                embeddings=[_check_embedding(np.array(e)) for e in item["embeddings"]],
            )
            gallery.entries.append(entry)
            digits = "".join(ch for ch in item["person_id"] if ch.isdigit())
            if digits:
                max_num = max(max_num, int(digits))
        gallery._next_id = max_num + 1
        return gallery

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())

    @classmethod
    def load(cls, path) -> "IdentityGallery":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json(fh.read())
