from pydantic import BaseModel, ConfigDict


class SchemaBase(BaseModel):
    """Base model configuration"""

    model_config = ConfigDict(use_enum_values=True, frozen=True)
