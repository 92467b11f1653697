"""Exception types raised by the genretopics pipeline."""


class GenreTopicsError(Exception):
    """Base class for all errors raised by this package."""


# -- audio ----------------------------------------------------------------

class MalformedWav(GenreTopicsError):
    """Input bytes are not a valid RIFF/WAVE container."""


class UnsupportedEncoding(GenreTopicsError):
    """WAV encoding other than integer PCM or 32-bit float."""


class SignalTooShort(GenreTopicsError):
    """Signal shorter than a single clip."""


# -- mfcc -----------------------------------------------------------------

class DegenerateBand(GenreTopicsError):
    """Two mel filter centers collapse onto the same FFT bin."""


class ClipTooShort(GenreTopicsError):
    """Clip shorter than one analysis frame."""


# -- vocab ----------------------------------------------------------------

class InsufficientData(GenreTopicsError):
    """Fewer feature vectors than requested codebook entries."""


class DimensionMismatch(GenreTopicsError):
    """Feature dimensionality does not match the codebook."""


class EmptyDocument(GenreTopicsError):
    """Song contributed no clips."""


class MissingLabel(GenreTopicsError):
    """Song has no genre label."""


# -- lda ------------------------------------------------------------------

class EmptyCorpus(GenreTopicsError):
    """Corpus holds no documents."""


class UnknownWord(GenreTopicsError):
    """Token id outside the model vocabulary."""


class ZeroProbabilityWord(GenreTopicsError):
    """Word has zero marginal probability under every topic."""


# -- interpret ------------------------------------------------------------

class UnusedWord(GenreTopicsError):
    """No clip was ever assigned to this word."""


class MissingWordProfile(GenreTopicsError):
    """A word with positive topic mass has no genre profile."""


class MissingTopicProfile(GenreTopicsError):
    """A topic with positive probability has no genre profile."""


class WindowTooLarge(GenreTopicsError):
    """Smoothing window longer than the token sequence."""


# -- evaluate -------------------------------------------------------------

class GenreTooSmall(GenreTopicsError):
    """A genre has too few documents to split."""


class SingleClass(GenreTopicsError):
    """Classifier training needs at least two distinct labels."""


class EmptyTestSet(GenreTopicsError):
    """No documents to evaluate on."""


# -- viz ------------------------------------------------------------------

class UnknownGenre(GenreTopicsError):
    """Distribution contains a genre missing from the palette."""


class TimelineTooShort(GenreTopicsError):
    """Timeline charts need at least two entries."""


# -- pipeline / cli -------------------------------------------------------

class EmptyDataset(GenreTopicsError):
    """Dataset root contains no usable WAV files."""


class DuplicateSongId(GenreTopicsError):
    """Two dataset entries resolved to the same song id."""


class PipelineError(GenreTopicsError):
    """Stage failure with song/stage context attached."""

    def __init__(self, stage, message, song_id=None):
        self.stage = stage
        self.song_id = song_id
        where = f"stage={stage}" + (f" song={song_id}" if song_id else "")
        super().__init__(f"[{where}] {message}")
