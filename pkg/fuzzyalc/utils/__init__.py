# Knowledge-base and interpretation file handling
