class ExportError(Exception):
    """Base class for exporter failures."""

    @property
    def name(self) -> str:
        return type(self).__name__


class UnknownModel(ExportError):
    """Model id is not in the zoo registry."""


class HookFailure(ExportError):
    """Could not attach to the model's last convolutional stage."""


class MalformedLine(ExportError):
    """Annotation line does not parse as 'image_id x y width height'."""
