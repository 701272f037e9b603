from typing import Any, get_args, get_origin

from pydantic import BaseModel, ConfigDict, model_validator


class FileBackedModel(BaseModel):
    """Base for models that are filled from `key = value` config files.

    File values arrive as strings: "none" maps to None and comma-separated
    text maps to a list for list-typed fields. Everything else is left to
    pydantic's own coercion.
    """

    model_config = ConfigDict(extra="forbid", validate_assignment=True)

    @model_validator(mode="before")
    @classmethod
    def _coerce_file_strings(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        coerced = dict(data)
        for key, value in data.items():
            if not isinstance(value, str) or key not in cls.model_fields:
                continue
            text = value.strip()
            if text.lower() in ("none", "null", ""):
                coerced[key] = None
            elif _is_list_field(cls.model_fields[key].annotation):
                coerced[key] = [part.strip() for part in text.split(",") if part.strip()]
        return coerced


def _is_list_field(annotation: Any) -> bool:
    if get_origin(annotation) in (list, tuple):
        return True
    return any(get_origin(arg) in (list, tuple) for arg in get_args(annotation))
