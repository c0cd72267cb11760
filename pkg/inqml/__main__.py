from inqml.main import app

app(prog_name="inqml")
