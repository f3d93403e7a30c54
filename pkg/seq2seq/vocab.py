"""Letter vocabulary: the configured letters plus start-of-word and end-of-word symbols."""

from dataclasses import dataclass
from typing import Iterable, List

from common.config import ALPHABET
from common.errors import DataError

START = "<s>"
END = "</s>"


@dataclass(frozen=True)
class Vocabulary:
    letters: str = ALPHABET

    @property
    def size(self) -> int:
        return len(self.letters) + 2

    @property
    def start_id(self) -> int:
        return len(self.letters)

    @property
    def end_id(self) -> int:
        return len(self.letters) + 1

    def encode(self, word: str) -> List[int]:
        """Letter ids of a word (upper-cased). Raises DataError on characters outside the alphabet."""
        ids = []
        for ch in word.upper():
            index = self.letters.find(ch)
            if index < 0:
                raise DataError(f"character {ch!r} in {word!r} is not in the alphabet")
            ids.append(index)
        return ids

    def decode(self, ids: Iterable[int]) -> str:
        """Letters for ids, stopping at the end symbol and skipping the start symbol."""
        out = []
        for i in ids:
            if i == self.end_id:
                break
            if i == self.start_id:
                continue
            out.append(self.letters[i])
        return "".join(out)

    def symbol(self, i: int) -> str:
        if i == self.start_id:
            return START
        if i == self.end_id:
            return END
        return self.letters[i]

    def check(self, i: int) -> int:
        if not 0 <= int(i) < self.size:
            raise DataError(f"symbol id {i} is outside the vocabulary of size {self.size}")
        return int(i)
