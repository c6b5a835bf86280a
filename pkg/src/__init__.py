# Forecast toolkit - source package
