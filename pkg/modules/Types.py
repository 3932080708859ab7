from pydantic import BaseModel, Field

DEFAULT_DATA_DIRECTORY = "~/.gcover"

# Environment variable -> config key
ENVIRONMENT_OVERRIDES = {
    "GCOVER_ORBIT_ARITY": "orbit_arity",
    "GCOVER_MAX_DEGREE": "max_degree",
}


class ConfigModel(BaseModel):
    orbit_arity: int = Field(default=2, ge=1, description="Arity bound for orbit relations in structure restrictions")
    max_degree: int = Field(default=0, ge=0, description="Degree cap for extraction and projective limits (0 = all degrees)")
    z4_max_n: int = Field(default=3, ge=1, description="Largest n accepted by the z4 example")
    fuzz_seed: int = Field(default=0, description="Seed of the random simplicial groupoid corpus")
    fuzz_instances: int = Field(default=100, ge=0, description="Size of the random simplicial groupoid corpus")
    corpus_file: str = Field(default="", description="Fixture corpus file (empty = bundled data/corpus.yaml)")
    report_indent: int = Field(default=2, ge=0, description="JSON indentation of written documents")
