package org.joda.time;

import org.joda.time.base.BaseDateTime;
import org.joda.time.chrono.ISOChronology;
import org.joda.time.format.DateTimeFormatter;

public final class DateTime extends BaseDateTime {

    public DateTime(long instant, DateTimeZone zone) {
        super(instant, ISOChronology.getInstance(zone));
    }

    public DateTime(
            int year,
            int monthOfYear,
            int dayOfMonth,
            int hourOfDay,
            int minuteOfHour,
            DateTimeZone zone) {
        super(ISOChronology.getInstance(zone).getDateTimeMillis(
                year, monthOfYear, dayOfMonth, hourOfDay, minuteOfHour, 0, 0),
              ISOChronology.getInstance(zone));
    }

    public DateTimeZone getZone() {
        return getChronology().getZone();
    }

    public DateTime withZone(DateTimeZone newZone) {
        return new DateTime(getMillis(), newZone);
    }

    public DateTime plusHours(int hours) {
        if (hours == 0) {
            return this;
        }
        return new DateTime(getMillis() + hours * 3600000L, getZone());
    }

    @Override
    public String toString() {
        return DateTimeFormatter.isoDateTime().withZone(getZone()).print(getMillis());
    }
}
