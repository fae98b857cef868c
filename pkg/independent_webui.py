from FacetLM.api import on_ui_tabs


on_ui_tabs()[0][0].launch()
